import numpy as np
import pytest

from sorlayout.graph import Graph

_CRITERIA = []


@pytest.fixture
def path3():
    return Graph(3, ((0, 1), (1, 2)))


@pytest.fixture
def cycle4():
    return Graph(4, ((0, 1), (1, 2), (2, 3), (3, 0)))


@pytest.fixture
def single_edge():
    return Graph(2, ((0, 1),))


def random_connected_graph(rng: np.random.Generator, n: int, extra: float = 0.1,
                           weighted: bool = False) -> Graph:
    """Random spanning tree plus a sprinkle of extra edges."""
    order = rng.permutation(n)
    edges = {}
    for k in range(1, n):
        u, v = int(order[k]), int(order[rng.integers(0, k)])
        edges[(min(u, v), max(u, v))] = None
    for _ in range(int(extra * n)):
        u, v = (int(t) for t in rng.integers(0, n, 2))
        if u != v:
            edges.setdefault((min(u, v), max(u, v)), None)
    out = []
    for (u, v) in edges:
        out.append((u, v, float(rng.uniform(0.5, 3.0)) if weighted else None))
    return Graph(n, tuple(out))


@pytest.fixture
def criterion():
    """Record one pass/fail line for the acceptance summary."""

    def record(number, name, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name} {detail}".rstrip()
        _CRITERIA.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
