# tests/conftest.py
"""
Shared fixtures.

`small_example` is the six-vertex worked example: A and B on six vertices
each, twelve candidate edges. PRINTED_EDGES lists the candidate edges in the
order the example prints them (1-based labels); `example_order` maps that
printed position to the canonical edge index used everywhere else.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from core.instance import CandidateGraph, ProblemInstance, SimpleGraph  # noqa: E402

# Register every solver and generator once for the whole session.
import generators.grid      # noqa: E402,F401
import generators.powerlaw  # noqa: E402,F401
import solvers.bp           # noqa: E402,F401
import solvers.exhaustive   # noqa: E402,F401
import solvers.isorank      # noqa: E402,F401
import solvers.mr           # noqa: E402,F401

PRINTED_EDGES = [
    (2, 2), (2, 1), (2, 3), (2, 4), (1, 2), (1, 1),
    (3, 2), (3, 3), (4, 2), (4, 4), (5, 5), (6, 1),
]
PRINTED_WEIGHTS = [0.6, 0.9, 0.3, 0.1, 0.9, 0.6, 0.3, 0.5, 0.1, 0.4, 0.5, 1.0]
A_EDGES = [(1, 2), (2, 3), (2, 4), (2, 5), (2, 6), (1, 6)]
B_EDGES = [(1, 2), (2, 3), (2, 4), (2, 5)]

# square partners of every printed row (1-based printed positions)
PRINTED_SQUARES = {
    1: [6, 8, 10, 11, 12],
    2: [5, 7, 9], 3: [5, 7, 9], 4: [5, 7, 9],
    5: [2, 3, 4, 12],
    6: [1], 8: [1], 10: [1], 11: [1],
    7: [2, 3, 4], 9: [2, 3, 4],
    12: [1, 5],
}


def _zero_based(pairs):
    return [(a - 1, b - 1) for a, b in pairs]


def build_small_example() -> ProblemInstance:
    A = SimpleGraph.from_edges(6, _zero_based(A_EDGES))
    B = SimpleGraph.from_edges(6, _zero_based(B_EDGES))
    L = CandidateGraph.from_triplets(
        6, 6, [(i - 1, j - 1, w) for (i, j), w in zip(PRINTED_EDGES, PRINTED_WEIGHTS)]
    )
    return ProblemInstance(A=A, B=B, L=L, name="small-example")


@pytest.fixture
def small_example() -> ProblemInstance:
    return build_small_example()


@pytest.fixture
def example_order(small_example) -> np.ndarray:
    """example_order[k] = canonical index of printed edge k (0-based k)."""
    L = small_example.L
    return np.array([L.edge_index(i - 1, j - 1) for i, j in PRINTED_EDGES], dtype=np.int64)


def selection(instance: ProblemInstance, pairs_1_based) -> list:
    """Canonical indices of the listed 1-based (i, i') pairs."""
    return sorted(instance.L.edge_index(i - 1, j - 1) for i, j in pairs_1_based)


# ---------- hypothesis ----------

def _graph_edges(draw, n: int, limit=None):
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    if not pairs:
        return []
    size = len(pairs) if limit is None else min(limit, len(pairs))
    return draw(st.lists(st.sampled_from(pairs), unique=True, max_size=size))


@st.composite
def instances(draw, max_vertices: int = 5, max_edges: int = 12, positive: bool = False,
              max_graph_edges=None):
    """
    Random tiny instances, small enough for the exhaustive oracle. With
    max_graph_edges = m, A and B have at most m edges each, so there are at
    most 2 * m * m squares.
    """
    na = draw(st.integers(min_value=1, max_value=max_vertices))
    nb = draw(st.integers(min_value=1, max_value=max_vertices))
    a_edges = _graph_edges(draw, na, max_graph_edges)
    b_edges = _graph_edges(draw, nb, max_graph_edges)
    cells = [(i, j) for i in range(na) for j in range(nb)]
    chosen = draw(st.lists(st.sampled_from(cells), unique=True, min_size=1,
                           max_size=min(max_edges, len(cells))))
    low = 0.05 if positive else 0.0
    weights = draw(st.lists(
        st.floats(min_value=low, max_value=1.0, allow_nan=False, allow_infinity=False),
        min_size=len(chosen), max_size=len(chosen),
    ))
    L = CandidateGraph.from_triplets(na, nb, [(i, j, w) for (i, j), w in zip(chosen, weights)])
    return ProblemInstance(
        A=SimpleGraph.from_edges(na, a_edges),
        B=SimpleGraph.from_edges(nb, b_edges),
        L=L,
        name="random",
    )
