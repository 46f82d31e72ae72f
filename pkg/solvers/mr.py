# solvers/mr.py
"""
NetAlignMR: Lagrangian matching relaxation with subgradient multipliers.

Multipliers U live on the stored entries of S; only entries (e, f) with
e < f carry a value, the mirrored entry reads it through the transpose
index. Each iteration:

1. row weights  W[e, f] = beta/2 + U[e, f] - U[f, e]
2. maxrowmatch: for every row e an exact matching among e's square partners
   under W (non-positive partners never taken); d[e] is its value and S_L
   marks the partners chosen
3. one large exact matching x on L with weights alpha*w + d; its value is
   an upper bound on the optimum and x itself is a feasible solution
4. subgradient step on the upper entries, then clamp to [-0.5, 0.5]:
       U[e, f] -= gamma * x[e] * S_L[e, f]
       U[e, f] += gamma * S_L[f, e] * x[f]

The run keeps the smallest upper bound and the best feasible solution, and
stops early once they meet.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Iterable, Mapping, Optional, Tuple

import numpy as np

from core.instance import ProblemInstance
from core.interfaces import IterationCallback, Solver
from core.matching import max_weight_matching_arrays
from core.models import (
    AlignmentSolution,
    IterationRecord,
    MrConfig,
    SolveReport,
    StepSchedule,
    StopReason,
)
from core.objective import make_solution, recovery_fraction
from core.registry import register_solver

from .settings import mr_config

__all__ = ["MrState", "RowMatchResult", "maxrowmatch", "mr_iterate", "run_mr", "MrSolver"]

log = logging.getLogger(__name__)

CLAMP = 0.5
# relative shortfall of the upper bound below a feasible value that counts as rounding
ROUNDING_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class RowMatchResult:
    d: np.ndarray        # per L-edge: value of its row matching
    chosen: np.ndarray   # per stored S entry: 1 if the partner is in the row's matching


@dataclass(frozen=True, eq=False)
class MrState:
    """
    Multipliers plus what the last iteration produced.
    `step` is the current subgradient step; `stalled` counts iterations
    since best_upper last improved.
    """
    U: np.ndarray
    k: int = 0
    step: float = 0.4
    best_lower: Optional[AlignmentSolution] = None
    best_upper: float = float("inf")
    stalled: int = 0
    upper: Optional[float] = None
    solution: Optional[AlignmentSolution] = None

    @classmethod
    def initial(cls, instance: ProblemInstance, step: float) -> "MrState":
        return cls(U=np.zeros(instance.S.nnz), step=step)


def _solve_row(
    instance: ProblemInstance, weights: np.ndarray, e: int
) -> Tuple[int, np.ndarray, float]:
    S, L = instance.S, instance.L
    lo, hi = S.pattern.indptr[e], S.pattern.indptr[e + 1]
    entries = np.arange(lo, hi, dtype=np.int64)
    partners = S.col_of[lo:hi]
    picked, value = max_weight_matching_arrays(L.ei[partners], L.ej[partners], weights[lo:hi])
    return e, entries[picked], value


def maxrowmatch(weights: np.ndarray, instance: ProblemInstance, threads: int = 1) -> RowMatchResult:
    """
    Exact per-row matchings over S's pattern.

    Rows whose positive partners share no endpoint take all of them; only the
    remaining rows go through the matching kernel, optionally on a thread
    pool. Every row writes only its own slots.
    """
    S, L = instance.S, instance.L
    n = L.edge_count
    weights = np.asarray(weights, dtype=np.float64)
    positive = weights > 0
    chosen = positive.astype(np.int8)
    d = np.bincount(S.row_of, weights=np.where(positive, weights, 0.0), minlength=n) if n else np.zeros(0)

    k_pos = np.nonzero(positive)[0]
    rows = S.row_of[k_pos]
    partners = S.col_of[k_pos]
    base = max(L.rows, L.cols, 1)
    conflicted = np.zeros(n, dtype=bool)
    for ends in (L.ei[partners], L.ej[partners]):
        keys, counts = np.unique(rows * base + ends, return_counts=True)
        conflicted[keys[counts > 1] // base] = True

    todo = np.nonzero(conflicted)[0].tolist()
    if not todo:
        return RowMatchResult(d=d, chosen=chosen)

    if threads > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda e: _solve_row(instance, weights, e), todo))
    else:
        results = [_solve_row(instance, weights, e) for e in todo]

    indptr = S.pattern.indptr
    for e, picked, value in results:
        chosen[indptr[e]:indptr[e + 1]] = 0
        chosen[picked] = 1
        d[e] = value
    return RowMatchResult(d=d, chosen=chosen)


def mr_iterate(
    state: MrState,
    instance: ProblemInstance,
    alpha: float,
    beta: float,
    gamma: Optional[float] = None,
    threads: int = 1,
) -> MrState:
    """One relaxation step; `gamma` overrides the state's step when given."""
    S, L = instance.S, instance.L
    step = state.step if gamma is None else gamma
    k = state.k + 1
    T = S.transpose_index

    U = state.U
    rows = maxrowmatch(beta / 2.0 + U - U[T], instance, threads=threads)

    selected, _ = max_weight_matching_arrays(L.ei, L.ej, alpha * L.w + rows.d)
    solution = make_solution(instance, selected, alpha, beta, source="mr", iteration=k)
    # summed like the lower bound: alpha * weight first, then the row values
    upper = alpha * solution.weight + (float(np.sum(rows.d[selected])) if selected.size else 0.0)
    if upper < solution.objective <= upper + ROUNDING_SLACK * max(1.0, abs(upper)):
        upper = solution.objective

    x = np.zeros(L.edge_count)
    x[selected] = 1.0
    row_of, col_of = S.row_of, S.col_of
    F = U - step * x[row_of] * rows.chosen + step * rows.chosen[T] * x[col_of]
    F[row_of >= col_of] = 0.0
    new_U = np.clip(F, -CLAMP, CLAMP)

    best_lower = state.best_lower
    if best_lower is None or solution.objective > best_lower.objective:
        best_lower = solution
    improved = upper < state.best_upper
    return replace(
        state,
        U=new_U,
        k=k,
        step=step,
        best_lower=best_lower,
        best_upper=min(state.best_upper, upper),
        stalled=0 if improved else state.stalled + 1,
        upper=upper,
        solution=solution,
    )


def run_mr(
    instance: ProblemInstance,
    cfg: MrConfig,
    truth: Optional[Iterable[int]] = None,
    on_iteration: Optional[IterationCallback] = None,
) -> SolveReport:
    started = time.perf_counter()
    truth_list = list(truth) if truth is not None else None
    report = SolveReport(solver="mr", config=cfg.snapshot())
    log.info("mr start: %s alpha=%g beta=%g gamma=%g schedule=%s threads=%d",
             instance.describe(), cfg.alpha, cfg.beta, cfg.gamma,
             cfg.step_schedule.value, cfg.threads)

    state = MrState.initial(instance, cfg.gamma)
    for _ in range(cfg.max_iters):
        state = mr_iterate(state, instance, cfg.alpha, cfg.beta, threads=cfg.threads)
        solution = state.solution
        report.iterations_run = state.k
        report.offer(solution)
        report.offer_upper(state.upper)

        record = IterationRecord(
            iteration=state.k,
            lower_bound=solution.objective,
            weight=solution.weight,
            overlap=solution.overlaps,
            upper_bound=state.upper,
            recovery=recovery_fraction(solution.selected, truth_list) if truth_list else None,
        )
        report.records.append(record)
        if on_iteration:
            on_iteration(record)
        log.debug("k=%d upper=%.12g lower=%.12g step=%g", state.k, state.upper,
                  solution.objective, state.step)

        if report.gap is not None and report.gap <= cfg.tolerance:
            report.stop_reason = StopReason.GAP_CLOSED
            break

        if cfg.step_schedule is StepSchedule.HALVING and state.stalled >= cfg.stall_window:
            log.debug("k=%d upper bound stalled for %d iterations, halving step to %g",
                      state.k, state.stalled, state.step / 2.0)
            state = replace(state, step=state.step / 2.0, stalled=0)

    report.wall_time = time.perf_counter() - started
    log.info("mr done: %d iterations (%s), best lower %.12g, best upper %.12g",
             report.iterations_run, report.stop_reason.value,
             report.best.objective, report.best_upper)
    return report


class MrSolver(Solver):
    def name(self) -> str:
        return "mr"

    def build_config(self, params: Mapping[str, Any], defaults: Mapping[str, Any]) -> MrConfig:
        return mr_config(params, defaults)

    def solve(
        self,
        instance: ProblemInstance,
        config: MrConfig,
        truth: Optional[Iterable[int]] = None,
        on_iteration: Optional[IterationCallback] = None,
    ) -> SolveReport:
        return run_mr(instance, config, truth=truth, on_iteration=on_iteration)


register_solver(MrSolver())
