import time

import pytest

from dp3lab.coeffs import compute_u_table

_CRITERIA: dict[int, str] = {}


class TimedTable:
    def __init__(self, N):
        t0 = time.perf_counter()
        self.table = compute_u_table(N)
        self.seconds = time.perf_counter() - t0


@pytest.fixture(scope="session")
def table60():
    return compute_u_table(60)


@pytest.fixture(scope="session")
def timed_table150():
    return TimedTable(150)


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number}: {detail}"
        _CRITERIA[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[k])
