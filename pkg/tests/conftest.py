import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_LINES: dict[int, str] = {}
_PATTERN = re.compile(r"test_criterion_(\d+)")


@pytest.fixture
def report():
    """Record the one-line verdict for an acceptance criterion."""

    def _report(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _LINES[number] = line
        print(line)

    return _report


def pytest_runtest_logreport(report):
    match = _PATTERN.search(report.nodeid)
    if match and report.when == "call" and report.failed:
        number = int(match.group(1))
        if number not in _LINES:
            _LINES[number] = f"criterion {number:>2}: FAIL  raised before reporting: {report.longrepr.reprcrash.message}"


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_LINES):
            terminalreporter.write_line(_LINES[number])
