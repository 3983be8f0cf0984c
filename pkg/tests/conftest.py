import time

import pytest

from qpool.design import (
    build_q_containment,
    build_q_intersection,
    build_set_containment,
)

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.failed and rep.when == "setup"):
        number, title = mark.args
        item.config.stash[_RESULTS][number] = (title, rep.outcome, rep.duration)


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash[_RESULTS]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, outcome, duration = results[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"AC{number:<3} {verdict}  {title}  ({duration:.1f} s)")


@pytest.fixture
def stopwatch():
    start = time.perf_counter()
    return lambda: time.perf_counter() - start


@pytest.fixture(scope="session")
def macula_234():
    return build_set_containment(2, 3, 4)


@pytest.fixture(scope="session")
def ngo_du_135():
    """Containment of lines in solids of F_2^5: 31 x 155."""
    return build_q_containment(2, 1, 3, 5)


@pytest.fixture(scope="session")
def nan_guo_1237():
    """Planes meeting 3-spaces of F_2^7 in a line: 2667 x 11811."""
    return build_q_intersection(2, 1, 2, 3, 7)
