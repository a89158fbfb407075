from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from budgetgen.cost import run_deep
from budgetgen.fixtures import register_fixtures

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("repo")

# start the deep-stack worker (and raise the recursion limit) before any
# hypothesis test records the limit it expects to restore
run_deep(lambda: None)


@pytest.fixture(scope="session")
def registry():
    return register_fixtures()


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance checks")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
