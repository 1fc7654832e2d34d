"""JSON experiment configuration.

Example::

    {
      "suite": ["AP-EX", "BK1"],
      "methods": [
        {"method": "sd"},
        {"method": "mmg-i", "N": 5, "gamma_rule": "constant"},
        {"method": "mmg-i", "N": 3, "gamma_rule": "bb"}
      ],
      "starts": 200,
      "seed": 0,
      "output": "bench-out",
      "aggregate": "median"
    }

Omitted method keys take the defaults in :data:`METHOD_DEFAULTS`.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from . import problems
from .bench import AGGREGATIONS
from .directions import MmgParams
from .linesearch import LineSearchConfig
from .solver import SolverConfig

SEED_ENV = "MOMOGRAD_SEED"

METHOD_DEFAULTS = {
    "method": "mmg-i",
    "N": 5,
    "gamma_rule": "constant",
    "gamma_star": 1e-10,
    "gamma_max": 1e6,
    "zeta": 1e-4,
    "rho": 1e-4,
    "delta": 0.5,
    "init_mode": "unit",
    "max_backtracks": 60,
    "lipschitz_L": None,
    "eps_theta": 1e-6,
    "max_iters": 10_000,
    "label": None,
}


class ConfigError(ValueError):
    pass


def method_spec(**overrides) -> dict:
    unknown = set(overrides) - set(METHOD_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown method keys: {sorted(unknown)}")
    spec = dict(METHOD_DEFAULTS)
    spec.update(overrides)
    return spec


def solver_config(spec: dict) -> SolverConfig:
    s = method_spec(**spec)
    try:
        return SolverConfig(
            method=s["method"],
            mmg=MmgParams(N=s["N"], gamma_rule=s["gamma_rule"], gamma_star=s["gamma_star"],
                          zeta=s["zeta"], gamma_max=s["gamma_max"]),
            ls=LineSearchConfig(rho=s["rho"], delta=s["delta"], init_mode=s["init_mode"],
                                max_backtracks=s["max_backtracks"], lipschitz_L=s["lipschitz_L"]),
            eps_theta=s["eps_theta"],
            max_iters=s["max_iters"],
            label=s["label"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


COMPARISON_METHODS = (
    {"method": "sd"},
    {"method": "fr"},
    {"method": "cd"},
    {"method": "hs"},
    {"method": "mmg-i", "N": 5, "gamma_rule": "constant"},
    {"method": "mmg-i", "N": 3, "gamma_rule": "bb"},
)


@dataclass
class ExperimentConfig:
    suite: list = field(default_factory=problems.names)
    methods: list = field(default_factory=lambda: [method_spec(**m) for m in COMPARISON_METHODS])
    starts: int = 200
    seed: int = 0
    output: str = "bench-out"
    aggregate: str = "median"

    def __post_init__(self):
        self.methods = [method_spec(**m) for m in self.methods]
        for name in self.suite:
            if name not in problems.names():
                raise ConfigError(f"unknown problem {name!r}")
        if self.starts < 1:
            raise ConfigError("starts must be >= 1")
        if self.aggregate not in AGGREGATIONS:
            raise ConfigError(f"aggregate must be one of {AGGREGATIONS}")
        names = [self.solver_configs()[i].name for i in range(len(self.methods))]
        if len(set(names)) != len(names):
            raise ConfigError(f"method labels must be unique, got {names}")

    def solver_configs(self) -> list[SolverConfig]:
        return [solver_config(m) for m in self.methods]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {"suite", "methods", "starts", "seed", "output", "aggregate"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.loads(Path(path).read_text())

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())


def env_seed(default: Optional[int] = None) -> Optional[int]:
    value = os.environ.get(SEED_ENV)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {value!r}") from None
