import math

import pytest
from hypothesis import HealthCheck, settings

from helpers import ACCEPTANCE, SWEEP_COUNT, SWEEP_SEED, run_instance

from hexsphere.builders import ParallelogramParams, sample_family

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

H1 = math.sin(math.pi / 3)


@pytest.fixture(scope="session")
def sweep():
    """The 200-instance sweep, computed once per test session."""
    return [run_instance(p) for p in sample_family(SWEEP_SEED, SWEEP_COUNT)]


@pytest.fixture(scope="session")
def untwisted():
    return run_instance(ParallelogramParams(1.0, 1.0, 0.0))


@pytest.fixture(scope="session")
def twisted():
    return run_instance(ParallelogramParams(2.0, 1.0, 0.3))


@pytest.fixture(scope="session")
def three_edge():
    return run_instance(ParallelogramParams(2.0, 1.0, H1))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        name, passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {name}: {'PASS' if passed else 'FAIL'}  {detail}")
