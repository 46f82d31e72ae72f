# solvers/bp_oracle.py
"""
Reference max-product on the explicit factor graph (tiny instances only).

Variables: one binary x_e per L-edge and one binary x_s per square.
Factors:
- f_i / g_i': at most one selected edge at A-vertex i / B-vertex i'
- h_s: x_s = x_e * x_f, with log potential (beta/2) * x_s
- alpha * w_e * x_e is a unary term on x_e

Messages are log-domain value tables over {0, 1}; factor-to-variable
messages are computed by enumerating the factor's neighbourhood. The
returned log-ratios log(nu(1) / nu(0)) use the same layout as BpState, so
undamped bp_step can be compared entry by entry.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Tuple

import numpy as np

from core.errors import OracleScaleError
from core.instance import ProblemInstance

__all__ = ["oracle_max_product", "MAX_EDGES", "MAX_SQUARES", "MAX_STEPS"]

MAX_EDGES = 20
MAX_SQUARES = 40
MAX_STEPS = 10
_MAX_FACTOR_DEGREE = 14


def _matching_factor(
    members: List[int], incoming: np.ndarray
) -> Dict[int, np.ndarray]:
    """
    Messages from an 'at most one' factor to each of its member edges.
    incoming[e] is the (2,) log table edge e sends into this factor.
    """
    out: Dict[int, np.ndarray] = {}
    for e in members:
        others = [o for o in members if o != e]
        table = np.full(2, -np.inf)
        for xe in (0, 1):
            for assignment in itertools.product((0, 1), repeat=len(others)):
                if xe + sum(assignment) > 1:
                    continue
                value = sum(incoming[o][a] for o, a in zip(others, assignment))
                table[xe] = max(table[xe], value)
        out[e] = table
    return out


def _square_factor(half: float, from_partner: np.ndarray) -> np.ndarray:
    """h_s -> x_e, maximising over x_f and x_s = x_e * x_f (x_s sends a flat table)."""
    table = np.full(2, -np.inf)
    for xe in (0, 1):
        for xf in (0, 1):
            xs = xe * xf
            table[xe] = max(table[xe], half * xs + from_partner[xf])
    return table


def _normalise(table: np.ndarray) -> np.ndarray:
    return table - table.max()


def _log_ratio(tables: np.ndarray) -> np.ndarray:
    return tables[:, 1] - tables[:, 0]


def oracle_max_product(
    instance: ProblemInstance, alpha: float, beta: float, t: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Run t synchronous rounds from flat tables; return (y, z, sq) log-ratios
    of the edge-to-factor messages after round t.
    """
    L, S = instance.L, instance.S
    n = L.edge_count
    if n > MAX_EDGES or S.square_count > MAX_SQUARES or not 0 <= t <= MAX_STEPS:
        raise OracleScaleError(
            f"reference max-product limited to {MAX_EDGES} edges, {MAX_SQUARES} squares, "
            f"{MAX_STEPS} steps (got {n}, {S.square_count}, {t})"
        )

    at_a = [np.nonzero(L.ei == i)[0].tolist() for i in range(L.rows)]
    at_b = [np.nonzero(L.ej == j)[0].tolist() for j in range(L.cols)]
    if max([len(m) for m in at_a + at_b] or [0]) > _MAX_FACTOR_DEGREE:
        raise OracleScaleError("matching factor too large to enumerate")

    half = beta / 2.0
    row_of = S.row_of
    T = S.transpose_index
    entries_of = [np.nonzero(row_of == e)[0].tolist() for e in range(n)]

    unary = np.zeros((n, 2))
    unary[:, 1] = alpha * L.w

    to_f = np.zeros((n, 2))
    to_g = np.zeros((n, 2))
    to_h = np.zeros((S.nnz, 2))   # entry k = (e, f): e's table into square {e, f}

    for _ in range(t):
        f_hat = np.zeros((n, 2))
        g_hat = np.zeros((n, 2))
        for members in at_a:
            for e, table in _matching_factor(members, to_f).items():
                f_hat[e] = table
        for members in at_b:
            for e, table in _matching_factor(members, to_g).items():
                g_hat[e] = table
        h_hat = np.array([_square_factor(half, to_h[T[k]]) for k in range(S.nnz)]).reshape(-1, 2)

        new_f = np.zeros((n, 2))
        new_g = np.zeros((n, 2))
        new_h = np.zeros((S.nnz, 2))
        for e in range(n):
            squares = h_hat[entries_of[e]].sum(axis=0) if entries_of[e] else np.zeros(2)
            new_f[e] = _normalise(unary[e] + g_hat[e] + squares)
            new_g[e] = _normalise(unary[e] + f_hat[e] + squares)
            for k in entries_of[e]:
                new_h[k] = _normalise(unary[e] + f_hat[e] + g_hat[e] + squares - h_hat[k])
        to_f, to_g, to_h = new_f, new_g, new_h

    return _log_ratio(to_f), _log_ratio(to_g), _log_ratio(to_h)
