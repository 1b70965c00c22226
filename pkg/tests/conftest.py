import numpy as np
import pytest

from skewclust import Digraph


def cycle(n=3, w=1.0):
    return Digraph.from_edges(n, [(i, (i + 1) % n, w) for i in range(n)])


def two_cycles():
    # vertices 0,1,2 and 3,4,5 each form an oriented 3-cycle
    return Digraph.from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])


def random_digraph(rng, n, density, weighted=False, oriented=False):
    w = rng.uniform(0.5, 2.0, size=(n, n)) if weighted else np.ones((n, n))
    if oriented:
        # one orientation per sampled pair, as in the DSBM
        upper = np.triu(rng.random((n, n)) < density, 1)
        fwd = rng.random((n, n)) < 0.5
        mask = (upper & fwd) | (upper & ~fwd).T
    else:
        mask = rng.random((n, n)) < density
        np.fill_diagonal(mask, False)
    return Digraph.from_matrix(np.where(mask, w, 0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tri():
    return cycle(3)


@pytest.fixture
def edge2():
    return Digraph.from_edges(2, [(0, 1, 2.0)])


# -- acceptance summary: one line per criterion

_ACCEPT = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        if call.excinfo is None:
            state = "PASS"
        elif call.excinfo.errisinstance(pytest.skip.Exception):
            state = "SKIP"
        else:
            state = "FAIL"
        prev = _ACCEPT.get(num, (title, "PASS"))[1]
        # a criterion split over several tests fails if any part fails
        order = {"PASS": 0, "SKIP": 1, "FAIL": 2}
        _ACCEPT[num] = (title, state if order[state] >= order[prev] else prev)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPT:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPT):
        title, state = _ACCEPT[num]
        terminalreporter.write_line(f"criterion {num:>2}: {state:4}  {title}")
