# core/oracle.py
"""
Exhaustive optimum for tiny instances.

Walks every matching of L (each edge either skipped or taken when both of its
endpoints are still free) and keeps the best objective. The overlap count is
maintained incrementally: taking edge e adds the number of already-taken
edges that form a square with e.

This is the reference every solver is checked against, so it stays simple
and refuses to run past its cap instead of trying to be clever.
"""

from __future__ import annotations

import logging
from typing import Iterator, List, Tuple

from .errors import OracleScaleError
from .instance import ProblemInstance
from .models import AlignmentSolution
from .objective import make_solution

__all__ = [
    "DEFAULT_ORACLE_CAP",
    "enumerate_matchings",
    "brute_force_optimum",
    "optimal_selections",
]

log = logging.getLogger(__name__)

DEFAULT_ORACLE_CAP = 20


def _check_cap(instance: ProblemInstance, cap: int) -> None:
    if instance.edge_count > cap:
        raise OracleScaleError(
            f"exhaustive search refused: |E_L|={instance.edge_count} exceeds cap {cap}"
        )


def enumerate_matchings(
    instance: ProblemInstance, cap: int = DEFAULT_ORACLE_CAP
) -> Iterator[Tuple[Tuple[int, ...], float, int]]:
    """
    Yield (selected edge indices, weight, overlaps) for every matching of L,
    the empty matching included.
    """
    _check_cap(instance, cap)
    L = instance.L
    n = L.edge_count
    ei = L.ei.tolist()
    ej = L.ej.tolist()
    w = L.w.tolist()
    partners = [set(instance.S.partners(e).tolist()) for e in range(n)]

    used_a: set = set()
    used_b: set = set()
    chosen: List[int] = []

    def walk(k: int, weight: float, overlaps: int):
        if k == n:
            yield tuple(chosen), weight, overlaps
            return
        yield from walk(k + 1, weight, overlaps)
        a, b = ei[k], ej[k]
        if a in used_a or b in used_b:
            return
        gained = sum(1 for f in chosen if f in partners[k])
        used_a.add(a)
        used_b.add(b)
        chosen.append(k)
        yield from walk(k + 1, weight + w[k], overlaps + gained)
        chosen.pop()
        used_a.discard(a)
        used_b.discard(b)

    yield from walk(0, 0.0, 0)


def optimal_selections(
    instance: ProblemInstance,
    alpha: float,
    beta: float,
    cap: int = DEFAULT_ORACLE_CAP,
    rel_tol: float = 1e-12,
) -> Tuple[float, List[Tuple[int, ...]]]:
    """
    Optimum value and every matching attaining it (values within rel_tol of
    each other count as ties). Used to certify a unique optimum.
    """
    best = float("-inf")
    winners: List[Tuple[int, ...]] = []
    for selected, weight, overlaps in enumerate_matchings(instance, cap):
        value = alpha * weight + beta * overlaps
        slack = rel_tol * max(1.0, abs(best)) if winners else 0.0
        if value > best + slack:
            best, winners = value, [selected]
        elif abs(value - best) <= slack:
            winners.append(selected)
    return best, winners


def brute_force_optimum(
    instance: ProblemInstance,
    alpha: float,
    beta: float,
    cap: int = DEFAULT_ORACLE_CAP,
) -> AlignmentSolution:
    """Globally optimal matching; ties keep the first one enumerated."""
    best_value = float("-inf")
    best_sel: Tuple[int, ...] = ()
    count = 0
    for selected, weight, overlaps in enumerate_matchings(instance, cap):
        count += 1
        value = alpha * weight + beta * overlaps
        if value > best_value:
            best_value, best_sel = value, selected
    log.debug("exhaustive search over %d matchings, optimum %.12g", count, best_value)
    return make_solution(instance, best_sel, alpha, beta, source="oracle")
