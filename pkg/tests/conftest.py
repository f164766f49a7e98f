import numpy as np
import pytest
from hypothesis import strategies as st

from harary_clust.graph import SignedGraph


def triangle(signs=(1, 1, -1)) -> SignedGraph:
    # edge order: v0v1, v0v2, v1v2
    return SignedGraph.from_edges(3, [(0, 1, signs[0]), (0, 2, signs[1]), (1, 2, signs[2])])


def path(signs) -> SignedGraph:
    return SignedGraph.from_edges(len(signs) + 1, [(i, i + 1, s) for i, s in enumerate(signs)])


def cycle(signs) -> SignedGraph:
    n = len(signs)
    return SignedGraph.from_edges(n, [(i, (i + 1) % n, s) for i, s in enumerate(signs)])


@st.composite
def signed_graphs(draw, min_n=1, max_n=12, min_edges=0):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=min(min_edges, len(pairs)))) if pairs else []
    signs = draw(st.lists(st.sampled_from([-1, 1]), min_size=len(chosen), max_size=len(chosen)))
    return SignedGraph.from_edges(n, [(u, v, s) for (u, v), s in zip(chosen, signs)])


@st.composite
def connected_signed_graphs(draw, min_n=1, max_n=10):
    """Random spanning tree plus extra edges, so always connected."""
    n = draw(st.integers(min_n, max_n))
    edges = {}
    for v in range(1, n):
        p = draw(st.integers(0, v - 1))
        edges[(p, v)] = draw(st.sampled_from([-1, 1]))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in edges]
    if pairs:
        extra = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
        for e in extra:
            edges[e] = draw(st.sampled_from([-1, 1]))
    return SignedGraph.from_edges(n, [(u, v, s) for (u, v), s in edges.items()])


def sigmas(n):
    return st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n).map(lambda s: np.array(s, dtype=np.int8))


@pytest.fixture
def tri():
    return triangle()


ACCEPTANCE_LOG: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
