# core/instance.py
"""
Instance model: the graphs A and B, the candidate graph L, and the two
matrices every solver is written against.

- SimpleGraph: undirected, simple; edges kept as (u < v) pairs in
  lexicographic order with a cached CSR adjacency.
- CandidateGraph: the edges of L in canonical order, ascending by (i, i').
  Edge indices 0..|E_L|-1 are the only ordering used for x, w and S.
- SquaresMatrix: symmetric 0/1 CSR pattern over edge indices; entry (e, f)
  is set iff e = ii', f = jj' with (i, j) in E_A and (i', j') in E_B.
  `transpose_index[k]` is the position of entry (f, e) for entry k = (e, f),
  so per-direction arrays (BP square messages, MR multipliers) can be read
  "the other way round" with one fancy index.
- IncidenceMatrix: one row per vertex of A (row_part) and of B (col_part).

Bad input is rejected, never repaired (duplicates, self loops, range).
All of these are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import InvalidInstanceError

__all__ = [
    "SimpleGraph",
    "CandidateGraph",
    "SquaresMatrix",
    "IncidenceMatrix",
    "ProblemInstance",
    "canonical_edge_order",
    "build_squares",
    "build_incidence",
]


def canonical_edge_order(ei: Sequence[int], ej: Sequence[int]) -> np.ndarray:
    """
    Permutation that sorts candidate edges ascending by (i, then i').

    >>> canonical_edge_order([2, 1], [1, 1]).tolist()
    [1, 0]
    """
    ei = np.asarray(ei, dtype=np.int64)
    ej = np.asarray(ej, dtype=np.int64)
    if ei.size == 0:
        return np.zeros(0, dtype=np.int64)
    # lexsort: last key is primary
    return np.lexsort((ej, ei)).astype(np.int64)


@dataclass(frozen=True, eq=False)
class SimpleGraph:
    vertex_count: int
    u: np.ndarray
    v: np.ndarray

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Tuple[int, int]]) -> "SimpleGraph":
        pairs = [(int(a), int(b)) for a, b in edges]
        if vertex_count < 0:
            raise InvalidInstanceError("vertex_count must be nonnegative")
        seen = set()
        for a, b in pairs:
            if a == b:
                raise InvalidInstanceError(f"self-loop at vertex {a}")
            if not (0 <= a < vertex_count and 0 <= b < vertex_count):
                raise InvalidInstanceError(
                    f"edge ({a}, {b}) outside vertex range 0..{vertex_count - 1}"
                )
            key = (min(a, b), max(a, b))
            if key in seen:
                raise InvalidInstanceError(f"duplicate edge {key}")
            seen.add(key)
        ordered = sorted(seen)
        u = np.array([p[0] for p in ordered], dtype=np.int64)
        v = np.array([p[1] for p in ordered], dtype=np.int64)
        return cls(vertex_count=vertex_count, u=u, v=v)

    @property
    def edge_count(self) -> int:
        return int(self.u.size)

    def edges(self) -> List[Tuple[int, int]]:
        return list(zip(self.u.tolist(), self.v.tolist()))

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        n = self.vertex_count
        rows = np.concatenate([self.u, self.v])
        cols = np.concatenate([self.v, self.u])
        data = np.ones(rows.size, dtype=np.int8)
        adj = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
        adj.sort_indices()
        return adj

    def neighbors(self, vertex: int) -> List[int]:
        adj = self.adjacency
        return adj.indices[adj.indptr[vertex]:adj.indptr[vertex + 1]].tolist()

    def degrees(self) -> np.ndarray:
        return np.diff(self.adjacency.indptr)

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.neighbors(a)


@dataclass(frozen=True, eq=False)
class CandidateGraph:
    """
    Weighted bipartite candidate graph L between V_A (rows) and V_B (cols).
    Arrays ei, ej, w are in canonical order.
    """
    rows: int
    cols: int
    ei: np.ndarray
    ej: np.ndarray
    w: np.ndarray

    @classmethod
    def from_triplets(
        cls,
        rows: int,
        cols: int,
        triplets: Iterable[Tuple[int, int, float]],
    ) -> "CandidateGraph":
        items = list(triplets)
        ei = np.array([int(t[0]) for t in items], dtype=np.int64)
        ej = np.array([int(t[1]) for t in items], dtype=np.int64)
        w = np.array([float(t[2]) for t in items], dtype=np.float64)
        return cls.from_arrays(rows, cols, ei, ej, w)

    @classmethod
    def from_arrays(cls, rows: int, cols: int, ei, ej, w) -> "CandidateGraph":
        ei = np.asarray(ei, dtype=np.int64)
        ej = np.asarray(ej, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        if not (ei.shape == ej.shape == w.shape):
            raise InvalidInstanceError("candidate edge arrays differ in length")
        if ei.size:
            if ei.min() < 0 or ei.max() >= rows:
                raise InvalidInstanceError("candidate edge endpoint outside V_A")
            if ej.min() < 0 or ej.max() >= cols:
                raise InvalidInstanceError("candidate edge endpoint outside V_B")
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise InvalidInstanceError("candidate weights must be finite and nonnegative")
        order = canonical_edge_order(ei, ej)
        ei, ej, w = ei[order], ej[order], w[order]
        if ei.size > 1:
            dup = (ei[1:] == ei[:-1]) & (ej[1:] == ej[:-1])
            if np.any(dup):
                k = int(np.argmax(dup))
                raise InvalidInstanceError(f"duplicate candidate edge ({ei[k]}, {ej[k]})")
        for arr in (ei, ej, w):
            arr.setflags(write=False)
        return cls(rows=rows, cols=cols, ei=ei, ej=ej, w=w)

    @property
    def edge_count(self) -> int:
        return int(self.ei.size)

    def edge(self, index: int) -> Tuple[int, int]:
        return int(self.ei[index]), int(self.ej[index])

    @cached_property
    def _index(self) -> Dict[Tuple[int, int], int]:
        return {(int(a), int(b)): k for k, (a, b) in enumerate(zip(self.ei, self.ej))}

    def edge_index(self, i: int, j: int) -> Optional[int]:
        return self._index.get((int(i), int(j)))

    @cached_property
    def by_row(self) -> Tuple[np.ndarray, np.ndarray]:
        """(indptr, edge ids) grouping edges by their V_A endpoint."""
        counts = np.bincount(self.ei, minlength=self.rows)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        return indptr, np.arange(self.edge_count, dtype=np.int64)

    @cached_property
    def by_col(self) -> Tuple[np.ndarray, np.ndarray]:
        """(indptr, edge ids) grouping edges by their V_B endpoint."""
        counts = np.bincount(self.ej, minlength=self.cols)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        order = np.lexsort((self.ei, self.ej)).astype(np.int64)
        return indptr, order


@dataclass(frozen=True, eq=False)
class SquaresMatrix:
    size: int
    pattern: sp.csr_matrix
    row_of: np.ndarray            # row (edge e) of every stored entry
    transpose_index: np.ndarray   # entry (e, f) -> position of (f, e)

    @property
    def nnz(self) -> int:
        return int(self.pattern.nnz)

    @property
    def square_count(self) -> int:
        return self.nnz // 2

    @property
    def col_of(self) -> np.ndarray:
        return self.pattern.indices

    def partners(self, e: int) -> np.ndarray:
        p = self.pattern
        return p.indices[p.indptr[e]:p.indptr[e + 1]]

    def row_degrees(self) -> np.ndarray:
        return np.diff(self.pattern.indptr)

    def to_dense(self) -> np.ndarray:
        return self.pattern.toarray().astype(np.int64)


@dataclass(frozen=True, eq=False)
class IncidenceMatrix:
    row_part: sp.csr_matrix   # |V_A| x |E_L|
    col_part: sp.csr_matrix   # |V_B| x |E_L|

    @property
    def stacked(self) -> sp.csr_matrix:
        return sp.vstack([self.row_part, self.col_part], format="csr")

    def counts(self, x: np.ndarray) -> np.ndarray:
        """A x: number of selected edges at each vertex of V_A then V_B."""
        return self.stacked @ np.asarray(x, dtype=np.int64)


def _expand(indptr: np.ndarray, values: np.ndarray, src: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    For every position p in `src`, emit (p, values[k]) for k in the CSR slice of src[p].
    Returns (positions, gathered values).
    """
    starts = indptr[src]
    counts = indptr[src + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=values.dtype)
    rep = np.repeat(np.arange(src.size, dtype=np.int64), counts)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    return rep, values[np.repeat(starts, counts) + offsets]


def build_squares(A: SimpleGraph, B: SimpleGraph, L: CandidateGraph) -> SquaresMatrix:
    """
    Squares pattern over the edges of L.

    For each L-edge e = ii', walk j in N_A(i), then the L-edges f = jj' at j,
    and keep f when (i', j') is an edge of B. Work is proportional to the
    number of (e, j, f) triples touched, never |E_L|^2.
    """
    if L.rows != A.vertex_count or L.cols != B.vertex_count:
        raise InvalidInstanceError(
            f"L is {L.rows}x{L.cols} but |V_A|={A.vertex_count}, |V_B|={B.vertex_count}"
        )
    n = L.edge_count
    a_adj = A.adjacency
    b_adj = B.adjacency
    l_indptr, l_ids = L.by_row

    e_idx = np.arange(n, dtype=np.int64)
    pos, j = _expand(a_adj.indptr, a_adj.indices.astype(np.int64), L.ei[e_idx])
    e_rep = e_idx[pos]
    pos2, f = _expand(l_indptr, l_ids, j)
    e_rep = e_rep[pos2]

    if f.size:
        bi = L.ej[e_rep]
        bj = L.ej[f]
        in_b = np.asarray(b_adj[bi, bj]).ravel() != 0
        e_rep, f = e_rep[in_b], f[in_b]

    data = np.ones(e_rep.size, dtype=np.int8)
    pattern = sp.csr_matrix((data, (e_rep, f)), shape=(n, n))
    pattern.sum_duplicates()
    pattern.sort_indices()

    row_of = np.repeat(np.arange(n, dtype=np.int64), np.diff(pattern.indptr))
    cols = pattern.indices.astype(np.int64)
    keys = row_of * max(n, 1) + cols
    tkeys = cols * max(n, 1) + row_of
    transpose_index = np.searchsorted(keys, tkeys).astype(np.int64)
    for arr in (row_of, transpose_index):
        arr.setflags(write=False)
    return SquaresMatrix(size=n, pattern=pattern, row_of=row_of, transpose_index=transpose_index)


def build_incidence(L: CandidateGraph) -> IncidenceMatrix:
    n = L.edge_count
    cols = np.arange(n, dtype=np.int64)
    ones = np.ones(n, dtype=np.int8)
    row_part = sp.csr_matrix((ones, (L.ei, cols)), shape=(L.rows, n))
    col_part = sp.csr_matrix((ones, (L.ej, cols)), shape=(L.cols, n))
    return IncidenceMatrix(row_part=row_part, col_part=col_part)


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """
    A, B, L plus the derived squares matrix S (built eagerly, validated on the way).
    """
    A: SimpleGraph
    B: SimpleGraph
    L: CandidateGraph
    name: str = "instance"
    S: SquaresMatrix = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "S", build_squares(self.A, self.B, self.L))

    @cached_property
    def incidence(self) -> IncidenceMatrix:
        return build_incidence(self.L)

    @property
    def edge_count(self) -> int:
        return self.L.edge_count

    @property
    def w(self) -> np.ndarray:
        return self.L.w

    def describe(self) -> Dict[str, int]:
        return {
            "V_A": self.A.vertex_count,
            "E_A": self.A.edge_count,
            "V_B": self.B.vertex_count,
            "E_B": self.B.edge_count,
            "E_L": self.L.edge_count,
            "squares": self.S.square_count,
        }
