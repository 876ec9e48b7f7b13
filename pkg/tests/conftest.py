import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from siegel_sieve.characters import real_characters  # noqa: E402
from siegel_sieve.qfield import class_group  # noqa: E402

# Filled by tests/test_acceptance.py; printed in the terminal summary.
ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def G20():
    return class_group(-20)


@pytest.fixture(scope="session")
def G84():
    return class_group(-84)


@pytest.fixture(scope="session")
def chars20(G20):
    return real_characters(G20)


@pytest.fixture(scope="session")
def chars84(G84):
    return real_characters(G84)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
