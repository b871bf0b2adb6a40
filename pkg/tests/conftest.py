import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from recall import instances

settings.register_profile("recall", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("recall")


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


@pytest.fixture(scope="session")
def driver():
    return instances.absentminded_driver()


@pytest.fixture(scope="session")
def shootout():
    return instances.forgetful_shootout()


@pytest.fixture(scope="session")
def coordination():
    return instances.coordination_game()


@pytest.fixture(scope="session")
def catalog():
    return instances.all_games()


_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    ok = rep.passed or (rep.when != "call" and not rep.failed)
    prev = _CRITERIA.get(n, (title, True))
    _CRITERIA[n] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok = _CRITERIA[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n:2d}: {title}")
