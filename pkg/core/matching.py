# core/matching.py
"""
Exact maximum-weight bipartite matching (not maximum cardinality, not perfect).

Used for rounding real-valued scores (BP messages, IsoRank iterates), for the
large matching and the per-row small matchings of the matching relaxation.
The relaxation's upper bound is only valid with exact optima, so there is no
approximate path here.

Method:
- Edges with weight <= 0 are dropped; they can never improve a matching.
- If no two remaining edges share an endpoint, all of them are optimal.
- Otherwise the problem is reduced to a perfect matching on an augmented
  graph (a dummy partner per row and per column, plus a dummy-dummy edge
  mirroring every real edge) and handed to scipy's sparse shortest
  augmenting path solver (LAPJVsp). Every perfect matching of the augmented
  graph has the same size, so shifting all weights by a constant keeps the
  optimum and keeps every stored weight strictly positive.

Ties: among equal-value optima the lexicographically smallest set of edge
positions is returned, so results do not depend on the solver's internal
pivoting. An edge lies in some optimum iff it is matched or it closes a
zero-cost alternating cycle; those are found from Bellman-Ford potentials
on the residual graph and the strongly connected components of its tight
arcs. Only when such alternative edges exist is the smallest set pinned
down, edge by edge in index order, with one re-solve per alternative.
Values count as equal within a relative 1e-12, since the same optimum
summed in a different order may differ in the last bits.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import (
    NegativeCycleError,
    connected_components,
    min_weight_full_bipartite_matching,
    shortest_path,
)

from .errors import InvalidInstanceError

__all__ = [
    "WeightedBipartiteProblem",
    "MatchingResult",
    "max_weight_matching",
    "max_weight_matching_arrays",
]

log = logging.getLogger(__name__)

_TIE_RTOL = 1e-12
_TIGHT_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class WeightedBipartiteProblem:
    rows: int
    cols: int
    r: np.ndarray
    c: np.ndarray
    w: np.ndarray

    @classmethod
    def from_edges(cls, rows: int, cols: int, edges: Iterable[Tuple[int, int, float]]) -> "WeightedBipartiteProblem":
        items = list(edges)
        r = np.array([int(e[0]) for e in items], dtype=np.int64)
        c = np.array([int(e[1]) for e in items], dtype=np.int64)
        w = np.array([float(e[2]) for e in items], dtype=np.float64)
        if len(set(zip(r.tolist(), c.tolist()))) != len(items):
            raise InvalidInstanceError("duplicate (row, col) pair in matching problem")
        if r.size and (r.min() < 0 or r.max() >= rows or c.min() < 0 or c.max() >= cols):
            raise InvalidInstanceError("matching edge outside the declared shape")
        return cls(rows=rows, cols=cols, r=r, c=c, w=w)


@dataclass(frozen=True, eq=False)
class MatchingResult:
    selected: np.ndarray   # positions into the problem's edge list, ascending
    value: float

    def edges(self, problem: WeightedBipartiteProblem) -> set:
        return {(int(problem.r[k]), int(problem.c[k])) for k in self.selected}


def max_weight_matching(problem: WeightedBipartiteProblem) -> MatchingResult:
    selected, value = max_weight_matching_arrays(problem.r, problem.c, problem.w)
    return MatchingResult(selected=selected, value=value)


def max_weight_matching_arrays(r, c, w) -> Tuple[np.ndarray, float]:
    """
    Maximum-weight matching over parallel arrays (row, col, weight).
    (row, col) pairs must be unique. Returns (selected positions, value);
    ties go to the lexicographically smallest position set.
    """
    r = np.asarray(r, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    w = np.asarray(w, dtype=np.float64)

    keep = np.nonzero(w > 0)[0]
    if keep.size == 0:
        return np.zeros(0, dtype=np.int64), 0.0

    kr, kc, kw = r[keep], c[keep], w[keep]
    if _conflict_free(kr, kc):
        return keep, float(np.sum(kw))

    picked, alternatives = _solve_augmented(kr, kc, kw, find_alternatives=True)
    if alternatives.size:
        picked = _smallest_optimum(kr, kc, kw, picked, alternatives)
    selected = keep[picked]
    return selected, float(np.sum(w[selected]))


def _conflict_free(r: np.ndarray, c: np.ndarray) -> bool:
    return np.unique(r).size == r.size and np.unique(c).size == c.size


def _optimum(r: np.ndarray, c: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Positions of some maximum-weight matching; all w > 0."""
    if r.size == 0:
        return np.zeros(0, dtype=np.int64)
    if _conflict_free(r, c):
        return np.arange(r.size, dtype=np.int64)
    picked, _ = _solve_augmented(r, c, w, find_alternatives=False)
    return picked


def _smallest_optimum(
    r: np.ndarray, c: np.ndarray, w: np.ndarray, witness: np.ndarray, alternatives: np.ndarray
) -> np.ndarray:
    """
    Walk the edges of any optimum in position order and fix each one that
    some optimum extending the fixed prefix still contains.
    """
    best = float(np.sum(w[witness]))
    slack = _TIE_RTOL * max(1.0, abs(best))
    current = set(witness.tolist())
    candidates = sorted(current | set(alternatives.tolist()))

    fixed: List[int] = []
    used_r: set = set()
    used_c: set = set()
    for e in candidates:
        if int(r[e]) in used_r or int(c[e]) in used_c:
            continue
        if e not in current:
            blocked_r = used_r | {int(r[e])}
            blocked_c = used_c | {int(c[e])}
            free = np.array(
                [k for k in range(r.size) if int(r[k]) not in blocked_r and int(c[k]) not in blocked_c],
                dtype=np.int64,
            )
            rest = free[_optimum(r[free], c[free], w[free])] if free.size else free
            value = float(np.sum(w[fixed])) + float(w[e]) + float(np.sum(w[rest]))
            if value < best - slack:
                continue
            current = set(fixed) | {e} | set(rest.tolist())
        fixed.append(e)
        used_r.add(int(r[e]))
        used_c.add(int(c[e]))
    return np.array(sorted(fixed), dtype=np.int64)


def _solve_augmented(
    r: np.ndarray, c: np.ndarray, w: np.ndarray, find_alternatives: bool
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Positions (into r/c/w) of a maximum-weight matching; all w > 0. With
    find_alternatives, also the unmatched positions that belong to some
    other optimum.
    """
    row_ids, rr = np.unique(r, return_inverse=True)
    col_ids, cc = np.unique(c, return_inverse=True)
    nr, nc = row_ids.size, col_ids.size
    m = r.size
    shift = float(np.max(w))

    # left: real rows [0, nr), column dummies [nr, nr + nc)
    # right: real cols [0, nc), row dummies [nc, nc + nr)
    left = np.concatenate([
        rr,                                  # real edges
        np.arange(nr, dtype=np.int64),       # row -> its dummy
        nr + np.arange(nc, dtype=np.int64),  # column dummy -> column
        nr + cc,                             # dummy-dummy mirror of each real edge
    ])
    right = np.concatenate([
        cc,
        nc + np.arange(nr, dtype=np.int64),
        np.arange(nc, dtype=np.int64),
        nc + rr,
    ])
    data = np.concatenate([
        w + shift,
        np.full(nr, shift),
        np.full(nc, shift),
        np.full(m, shift),
    ])
    size = nr + nc
    graph = sp.csr_matrix((data, (left, right)), shape=(size, size))
    row_ind, col_ind = min_weight_full_bipartite_matching(graph, maximize=True)

    partner = np.empty(size, dtype=np.int64)
    partner[row_ind] = col_ind
    matched = partner[left] == right

    picked = np.sort(np.nonzero(matched[:m])[0])
    if not find_alternatives:
        return picked, np.zeros(0, dtype=np.int64)
    return picked, _alternative_edges(left, right, data, matched, size, m)


def _alternative_edges(
    left: np.ndarray, right: np.ndarray, data: np.ndarray, matched: np.ndarray, size: int, m: int
) -> np.ndarray:
    # residual graph in min-cost form: free edges left -> right at -data,
    # matched edges right -> left at +data; node 2*size is a virtual source
    tail = np.where(matched, size + right, left)
    head = np.where(matched, left, size + right)
    cost = np.where(matched, data, -data)
    source = 2 * size
    nodes = source + 1
    residual = sp.csr_matrix(
        (
            np.concatenate([cost, np.ones(2 * size)]),
            (np.concatenate([tail, np.full(2 * size, source)]), np.concatenate([head, np.arange(2 * size)])),
        ),
        shape=(nodes, nodes),
    )
    try:
        potential = shortest_path(residual, method="BF", directed=True, indices=source)
    except NegativeCycleError:
        log.debug("negative residual cycle from rounding; checking every unmatched edge for ties")
        return np.nonzero(~matched[:m])[0]

    reduced = cost + potential[tail] - potential[head]
    tight = reduced <= _TIGHT_RTOL * max(1.0, float(np.max(data)))
    tight_graph = sp.csr_matrix(
        (np.ones(int(tight.sum())), (tail[tight], head[tight])), shape=(2 * size, 2 * size)
    )
    _, labels = connected_components(tight_graph, directed=True, connection="strong")
    real = np.arange(m)
    alt = (~matched[:m]) & tight[:m] & (labels[tail[:m]] == labels[head[:m]])
    return real[alt]
