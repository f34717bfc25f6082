import pytest
from hypothesis import HealthCheck, settings

import loccdist as L

settings.register_profile(
    "suite", deadline=None, max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

#: criterion number -> status line, filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        status, desc = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"criterion {num} ({desc}): {status}")


@pytest.fixture
def bell2():
    return L.canned_example("bell2")


@pytest.fixture
def bell3():
    return L.canned_example("bell3")


@pytest.fixture
def bell4():
    return L.canned_example("bell4")


@pytest.fixture
def six4x4():
    return L.canned_example("six4x4")


@pytest.fixture
def domino9():
    return L.canned_example("domino9")
