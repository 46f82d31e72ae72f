# core/objective.py
"""
Scoring and checking selections of candidate edges.

A selection is any iterable of canonical edge indices. The only way a solver
turns a selection into an AlignmentSolution is `make_solution`, so weight,
overlap and objective always agree with each other.

Overlaps are counted exactly as integers by reading S restricted to the
selected rows and columns; the weight term is a plain float sum.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Sequence

import numpy as np

from .errors import FeasibilityError, UndefinedMetricError
from .instance import ProblemInstance
from .models import AlignmentSolution

__all__ = [
    "as_indices",
    "matching_violations",
    "is_feasible",
    "count_overlaps",
    "objective",
    "make_solution",
    "recovery_fraction",
    "objective_ratio",
]


def as_indices(selected: Iterable[int]) -> np.ndarray:
    arr = np.unique(np.asarray(list(selected), dtype=np.int64))
    return arr


def matching_violations(instance: ProblemInstance, selected: Iterable[int]) -> Dict[str, List[int]]:
    """
    Vertices covered by more than one selected edge.
    Returns {"A": [...], "B": [...]} (empty lists for a matching).
    """
    idx = as_indices(selected)
    L = instance.L
    if idx.size and (idx[0] < 0 or idx[-1] >= L.edge_count):
        raise FeasibilityError("selection references edges outside L")
    a_counts = np.bincount(L.ei[idx], minlength=L.rows)
    b_counts = np.bincount(L.ej[idx], minlength=L.cols)
    return {
        "A": np.nonzero(a_counts > 1)[0].tolist(),
        "B": np.nonzero(b_counts > 1)[0].tolist(),
    }


def is_feasible(instance: ProblemInstance, selected: Iterable[int]) -> bool:
    v = matching_violations(instance, selected)
    return not v["A"] and not v["B"]


def count_overlaps(instance: ProblemInstance, selected: Iterable[int]) -> int:
    """(1/2) x^T S x for the indicator x of `selected`."""
    idx = as_indices(selected)
    if idx.size < 2:
        return 0
    sub = instance.S.pattern[idx][:, idx]
    return int(sub.nnz) // 2


def _require_feasible(instance: ProblemInstance, selected: Sequence[int]) -> None:
    violations = matching_violations(instance, selected)
    if violations["A"] or violations["B"]:
        raise FeasibilityError(
            f"selection is not a matching: A-vertices {violations['A']}, B-vertices {violations['B']}",
            violations=violations,
        )


def objective(instance: ProblemInstance, selected: Iterable[int], alpha: float, beta: float) -> float:
    """alpha * w^T x + (beta / 2) x^T S x for a feasible selection."""
    idx = as_indices(selected)
    _require_feasible(instance, idx)
    weight = float(np.sum(instance.w[idx])) if idx.size else 0.0
    return alpha * weight + beta * count_overlaps(instance, idx)


def make_solution(
    instance: ProblemInstance,
    selected: Iterable[int],
    alpha: float,
    beta: float,
    source: str = "",
    iteration: int = 0,
) -> AlignmentSolution:
    idx = as_indices(selected)
    _require_feasible(instance, idx)
    weight = float(np.sum(instance.w[idx])) if idx.size else 0.0
    return AlignmentSolution(
        selected=tuple(int(e) for e in idx),
        weight=weight,
        overlaps=count_overlaps(instance, idx),
        alpha=alpha,
        beta=beta,
        source=source,
        iteration=iteration,
    )


def recovery_fraction(selected: Iterable[int], truth: Iterable[int]) -> float:
    """|x ∩ truth| / |truth|."""
    truth_set = set(int(t) for t in truth)
    if not truth_set:
        raise UndefinedMetricError("recovery fraction is undefined for an empty truth set")
    hits = len(truth_set.intersection(int(e) for e in selected))
    return hits / len(truth_set)


def objective_ratio(
    instance: ProblemInstance,
    selected: Iterable[int],
    truth: Iterable[int],
    alpha: float,
    beta: float,
) -> float:
    """Objective of `selected` divided by the objective of the truth matching."""
    reference = objective(instance, truth, alpha, beta)
    if reference == 0:
        raise UndefinedMetricError("truth matching has zero objective; ratio undefined")
    return objective(instance, selected, alpha, beta) / reference
