import numpy as np
import pytest

from momograd import directions
from momograd.core import psi
from momograd.directions import (
    DescentViolation, DirectionState, MmgParams, baseline_beta, baseline_direction, compute_beta,
    compute_gamma, compute_phi, memory_direction,
)
from momograd.subproblem import SubproblemSolution, solve_dual


def _sol(v, jac):
    v = np.asarray(v, dtype=float)
    return SubproblemSolution(v, psi(jac, v) + 0.5 * v @ v, np.ones(len(jac)) / len(jac), 0.0)


def test_gamma_constant_rule():
    st = DirectionState(N=2)
    st.push(np.ones(2), np.ones(2), np.eye(2), -np.ones(2), -1.0, -1.0)
    assert compute_gamma(st, np.zeros(2), np.zeros(2), MmgParams()) == 1.0


def test_gamma_bb_rule():
    params = MmgParams(gamma_rule="bb")
    st = DirectionState(N=1)
    st.push(np.zeros(2), np.zeros(2), np.eye(2), -np.ones(2), -1.0, -1.0)
    # q = x^k - x^{k-1} = (2, 0), h = v^k - v^{k-1} = (1, 0)
    assert compute_gamma(st, np.array([2.0, 0.0]), np.array([1.0, 0.0]), params) == 2.0
    # ratio 1e-12 falls below gamma*
    assert compute_gamma(st, np.array([1e-12, 0.0]), np.array([1.0, 0.0]), params) == 1.0
    # no change in v: ratio undefined
    assert compute_gamma(st, np.array([5.0, 0.0]), np.zeros(2), params) == 1.0
    # capped at gamma_max
    capped = MmgParams(gamma_rule="bb", gamma_max=10.0)
    assert compute_gamma(st, np.array([1e3, 0.0]), np.array([1.0, 0.0]), capped) == 10.0


@pytest.mark.parametrize("args, expected", [((-4, 2, 1, 1, 1), -1.0), ((0, 0, 0, 1, 1), 1.0), ((3, 5, 2, 2, 1), 7.0)])
def test_phi(args, expected):
    assert compute_phi(*args) == pytest.approx(expected)


@pytest.mark.parametrize("args, expected", [((-4, 2, 8), 0.25), ((-4, 2, 0), 0.0), ((-1, 1, 1), 1.0)])
def test_beta(args, expected):
    assert compute_beta(*args) == pytest.approx(expected)


def test_params_validation():
    with pytest.raises(ValueError):
        MmgParams(N=0)
    with pytest.raises(ValueError):
        MmgParams(gamma_rule="nope")


def test_first_direction_is_v():
    jac = np.array([[3.0, -1.0]])
    md = memory_direction(_sol([-3.0, 1.0], jac), np.zeros(2), jac, DirectionState(N=3), MmgParams(N=3))
    assert np.array_equal(md.d, [-3.0, 1.0])
    assert md.gamma == 1.0 and md.betas == ()


def test_memory_weights_are_positive_and_descend():
    rng = np.random.default_rng(11)
    params = MmgParams(N=3)
    st = DirectionState(N=3)
    for _ in range(30):
        jac = rng.normal(size=(2, 4))
        x = rng.normal(size=4)
        sol = solve_dual(jac)
        md = memory_direction(sol, x, jac, st, params)
        psi_v, psi_d = psi(jac, sol.v), psi(jac, md.d)
        assert psi_d < 0
        assert psi_d <= 0.5 * params.gamma_star * psi_v + 1e-12
        if st.k > 0:
            assert all(b > 0 for b in md.betas)
            assert len(md.betas) == st.n_memory
        st.push(x, sol.v, jac, md.d, psi_v, psi_d)
    assert st.n_memory == 3


def test_zero_betas_reduce_to_steepest_descent(monkeypatch):
    monkeypatch.setattr(directions, "compute_beta", lambda *a: 0.0)
    params = MmgParams(N=1)
    st = DirectionState(N=1)
    rng = np.random.default_rng(5)
    for _ in range(5):
        jac = rng.normal(size=(2, 3))
        sol = solve_dual(jac)
        md = directions.memory_direction(sol, np.zeros(3), jac, st, params)
        assert np.array_equal(md.d, sol.v)
        st.push(np.zeros(3), sol.v, jac, md.d, psi(jac, sol.v), psi(jac, md.d))


def test_memory_direction_rejects_ascent():
    jac = np.eye(2)
    bad = SubproblemSolution(np.array([1.0, 1.0]), 0.0, np.array([0.5, 0.5]), 0.0)
    with pytest.raises(DescentViolation):
        memory_direction(bad, np.zeros(2), jac, DirectionState(), MmgParams())


def _state_after(jac_prev, v_prev, d_prev):
    st = DirectionState(N=1)
    st.push(np.zeros(1), v_prev, jac_prev, d_prev, psi(jac_prev, v_prev), psi(jac_prev, d_prev))
    return st


def test_steepest_descent_baseline():
    jac = np.array([[1.0], [2.0]])
    sol = solve_dual(jac)
    st = _state_after(jac, np.array([-5.0]), np.array([-5.0]))
    assert np.array_equal(baseline_direction("sd", sol, jac, st), sol.v)


def test_fletcher_reeves_ratio():
    # psi(v^k) = -2 at the current point, psi(v^{k-1}) = -4 before
    jac_prev = np.array([[2.0]])
    st = _state_after(jac_prev, np.array([-2.0]), np.array([-2.0]))
    jac = np.array([[1.0]])
    sol = _sol([-2.0], jac)
    assert baseline_beta("fr", sol, jac, st) == pytest.approx(0.5)


def test_conjugate_descent_ratio():
    jac_prev = np.array([[2.0]])
    st = _state_after(jac_prev, np.array([-2.0]), np.array([-3.0]))
    jac = np.array([[1.0]])
    # psi(v^k) = -1, psi(x^{k-1}, d^{k-1}) = -6
    assert baseline_beta("cd", _sol([-1.0], jac), jac, st) == pytest.approx(1 / 6)


def test_hestenes_stiefel_zero_denominator():
    jac = np.array([[1.0, 0.0]])
    st = _state_after(jac, np.array([-1.0, 0.0]), np.array([-1.0, 0.0]))
    sol = _sol([-3.0, 0.0], jac)
    assert baseline_beta("hs", sol, jac, st) == 0.0
    assert np.array_equal(baseline_direction("hs", sol, jac, st), sol.v)


def test_hestenes_stiefel_clipped_at_zero():
    jac_prev = np.array([[1.0]])
    st = _state_after(jac_prev, np.array([-1.0]), np.array([-1.0]))
    jac = np.array([[0.5]])
    # numerator -psi(v^k) + psi(x^{k-1}, v^k) = 0.25 - 0.5 < 0
    assert baseline_beta("hs", _sol([-0.5], jac), jac, st) == 0.0


def test_unknown_baseline():
    with pytest.raises(ValueError):
        baseline_beta("xx", _sol([1.0], np.eye(1)), np.eye(1), DirectionState())
