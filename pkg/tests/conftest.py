"""Shared fixtures: the default scenario built once per session."""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from relshock import prepare_initial_data
from relshock.coordinate_map import CoordinateMap
from relshock.eos import EquationOfState, default_eos
from relshock.geo_solution import GeometricSolution
from relshock.mghd_boundary import build_boundary

settings.register_profile("relshock", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
settings.load_profile("relshock")

#: criterion number -> (passed, one-line detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")


@pytest.fixture(scope="session")
def eos() -> EquationOfState:
    return default_eos()


@pytest.fixture(scope="session")
def polytropic_eos() -> EquationOfState:
    return EquationOfState.polytropic(0.5, 0.3)


@pytest.fixture(scope="session")
def data():
    return prepare_initial_data()


@pytest.fixture(scope="session")
def sol(data) -> GeometricSolution:
    return GeometricSolution(data)


@pytest.fixture(scope="session")
def boundary(sol):
    return build_boundary(sol)


@pytest.fixture(scope="session")
def cmap(sol, boundary) -> CoordinateMap:
    return CoordinateMap(sol, boundary)
