import warnings

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_CRITERIA: dict[int, str] = {}


def format_criterion(number: int, title: str, ok: bool, detail: str) -> str:
    return f"criterion {number} {'PASS' if ok else 'FAIL'}  {title}: {detail}"


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


@pytest.fixture
def record_criterion():
    """Record one acceptance line; the lines are printed in the terminal summary."""

    def record(number, title, ok, detail):
        line = format_criterion(number, title, ok, detail)
        _CRITERIA[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])
