import numpy as np
import pytest

from cpoi.graph import StorageGraph
from cpoi.vlog import VersionLog

# two evolution tracks over eight triples
EXAMPLE_VERSIONS = {
    "a0": [1, 2, 3, 4, 5],
    "a1": [1, 2, 3, 4, 5, 6],
    "a2": [1, 2, 3, 4, 7, 8],
    "b0": [1, 2, 3],
    "b1": [1, 2, 3, 4, 5, 6],
    "b2": [1, 2, 7],
}
EXAMPLE_PARENTS = {"a0": None, "a1": "a0", "a2": "a1", "b0": None, "b1": "b0", "b2": "b1"}

# nine triples, five versions; stored sets {2,4},{1,5,9},{1,3,9},{1,2,6,9},{4,7,8}
REASSIGN_VERSIONS = [
    ("v1", [1, 2, 3, 4, 5, 9]),
    ("v2", [1, 5, 9]),
    ("v3", [1, 3, 9]),
    ("v4", [1, 2, 6, 9]),
    ("v5", [1, 2, 3, 4, 6, 7, 8, 9]),
]

NAMED_TRIPLES = [
    "<Manos, bestFriend, George>",
    "<Manos, age, 21>",
    "<George, bestFriend, John>",
    "<John, age, 32>",
    "<George, age, 24>",
    "<Mary, age, 28>",
    "<Mary, bestFriend, Deppy>",
    "<John, bestFriend, George>",
    "<Deppy, bestFriend, Manos>",
]


@pytest.fixture
def example_log():
    log = VersionLog()
    for label, ids in EXAMPLE_VERSIONS.items():
        log.add(label, ids, parent=EXAMPLE_PARENTS[label])
    return log


@pytest.fixture
def example_graph():
    g = StorageGraph()
    for label, ids in EXAMPLE_VERSIONS.items():
        g.insert_version(label, ids)
    return g


@pytest.fixture
def reassign_graph():
    g = StorageGraph()
    for label, ids in REASSIGN_VERSIONS:
        g.insert_version(label, ids)
    return g


def as_sets(family):
    return sorted(tuple(int(x) for x in n) for n in family)


def random_contents(rng, n_versions, t, p=0.4):
    out = []
    for _ in range(n_versions):
        ids = np.flatnonzero(rng.random(t) < p) + 1
        if ids.size == 0:
            ids = np.array([1 + int(rng.integers(t))])
        out.append(ids)
    return out


# -- acceptance verdicts ----------------------------------------------------------
# tests marked @pytest.mark.criterion(n) get one PASS/FAIL line each in the terminal summary

_VERDICTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    m = item.get_closest_marker("criterion")
    if m is None or call.when != "call":
        return
    n = m.args[0]
    ok = call.excinfo is None
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    prev = _VERDICTS.get(n)
    _VERDICTS[n] = (ok and (prev is None or prev[0]), "; ".join(x for x in (prev and prev[1], detail) if x))


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_VERDICTS):
        ok, detail = _VERDICTS[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
