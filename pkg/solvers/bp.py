# solvers/bp.py
"""
NetAlignBP: damped max-product belief propagation for network alignment.

Messages (all zero at t=0):
- y[e]  edge e = ii' to the matching node at i (A side)
- z[e]  edge e = ii' to the matching node at i' (B side)
- sq[k] edge e to the square node shared with f, for every stored entry
        k = (e, f) of S; sq[T[k]] is the message f sends into the same square.

One step (all reads from t-1):
    clip[k] = min(beta/2, max(0, beta/2 + sq[T[k]]))
    d[e]    = sum of clip over the entries of row e
    y[e]    = alpha*w[e] - max(0, max of z over the other edges at i') + d[e]
    z[e]    = alpha*w[e] - max(0, max of y over the other edges at i)  + d[e]
    sq[k]   = alpha*w[e] - (both maxima above) + d[e] - clip[k]

Every rounded iteration yields three candidate matchings: a greedy
per-A-vertex choice repaired into a matching, and exact maximum-weight
matchings weighted by y and by z. The report keeps the best one seen.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass
from typing import Any, Iterable, List, Mapping, Optional

import numpy as np

from core.instance import ProblemInstance
from core.interfaces import IterationCallback, Solver
from core.matching import max_weight_matching_arrays
from core.models import (
    AlignmentSolution,
    BpConfig,
    DampingMode,
    IterationRecord,
    SolveReport,
    StopReason,
)
from core.objective import make_solution, recovery_fraction
from core.registry import register_solver

from .settings import bp_config

__all__ = [
    "BpState",
    "bp_step",
    "damp",
    "greedy_selection",
    "decode",
    "run_bp",
    "BpSolver",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BpState:
    t: int
    y: np.ndarray
    z: np.ndarray
    sq: np.ndarray

    @classmethod
    def zeros(cls, instance: ProblemInstance) -> "BpState":
        n = instance.edge_count
        return cls(t=0, y=np.zeros(n), z=np.zeros(n), sq=np.zeros(instance.S.nnz))

    def change_from(self, other: "BpState") -> float:
        """Sup-norm distance over all three message arrays."""
        parts = [
            np.abs(a - b).max()
            for a, b in ((self.y, other.y), (self.z, other.z), (self.sq, other.sq))
            if a.size
        ]
        return float(max(parts)) if parts else 0.0


def _other_max(values: np.ndarray, groups: np.ndarray, n_groups: int) -> np.ndarray:
    """
    For every element, the max of `values` over the other elements in its
    group; -inf when it is alone.
    """
    m = values.size
    out = np.full(m, -np.inf)
    if m == 0:
        return out
    order = np.lexsort((-values, groups))
    counts = np.bincount(groups, minlength=n_groups)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])

    top1 = np.full(n_groups, -np.inf)
    top2 = np.full(n_groups, -np.inf)
    first = np.full(n_groups, -1, dtype=np.int64)
    has1 = counts >= 1
    has2 = counts >= 2
    first[has1] = order[starts[has1]]
    top1[has1] = values[first[has1]]
    top2[has2] = values[order[starts[has2] + 1]]

    out = top1[groups]
    is_first = first[groups] == np.arange(m)
    out[is_first] = top2[groups[is_first]]
    return out


def bp_step(state: BpState, instance: ProblemInstance, alpha: float, beta: float) -> BpState:
    """Undamped messages at t = state.t + 1."""
    L, S = instance.L, instance.S
    half = beta / 2.0
    n = L.edge_count

    clip = np.clip(half + state.sq[S.transpose_index], 0.0, half)
    d = np.bincount(S.row_of, weights=clip, minlength=n) if n else np.zeros(0)

    # competitors at the B endpoint read z, at the A endpoint read y
    max_b = np.maximum(_other_max(state.z, L.ej, L.cols), 0.0)
    max_a = np.maximum(_other_max(state.y, L.ei, L.rows), 0.0)

    base = alpha * L.w + d
    y = base - max_b
    z = base - max_a
    sq = (base - max_a - max_b)[S.row_of] - clip
    return BpState(t=state.t + 1, y=y, z=z, sq=sq)


def damp(prev: np.ndarray, new: np.ndarray, t: int, gamma: float, mode: DampingMode) -> np.ndarray:
    """Blend: power mode puts gamma**t on the new messages, constant mode gamma."""
    weight = gamma ** t if mode is DampingMode.POWER else gamma
    return (1.0 - weight) * prev + weight * new


def _damp_state(prev: BpState, new: BpState, cfg: BpConfig) -> BpState:
    t = new.t
    return BpState(
        t=t,
        y=damp(prev.y, new.y, t, cfg.gamma, cfg.damping_mode),
        z=damp(prev.z, new.z, t, cfg.gamma, cfg.damping_mode),
        sq=damp(prev.sq, new.sq, t, cfg.gamma, cfg.damping_mode),
    )


def greedy_selection(state: BpState, instance: ProblemInstance) -> np.ndarray:
    """
    Each A-vertex takes the edge sending it the largest y (smaller index on
    ties), whatever its sign; conflicts at B-vertices keep the larger message.
    """
    L = instance.L
    n = L.edge_count
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    idx = np.arange(n, dtype=np.int64)
    order = np.lexsort((idx, -state.y, L.ei))
    head = np.ones(n, dtype=bool)
    head[1:] = L.ei[order][1:] != L.ei[order][:-1]
    picks = order[head]

    # repair: strongest messages claim their B-vertex first
    picks = picks[np.lexsort((picks, -state.y[picks]))]
    taken = set()
    kept: List[int] = []
    for e in picks.tolist():
        b = int(L.ej[e])
        if b not in taken:
            taken.add(b)
            kept.append(e)
    return np.array(sorted(kept), dtype=np.int64)


def decode(
    state: BpState, instance: ProblemInstance, alpha: float, beta: float
) -> List[AlignmentSolution]:
    """Greedy, MWM-on-y and MWM-on-z candidates, in that order."""
    L = instance.L
    greedy = greedy_selection(state, instance)
    on_y, _ = max_weight_matching_arrays(L.ei, L.ej, state.y)
    on_z, _ = max_weight_matching_arrays(L.ei, L.ej, state.z)
    return [
        make_solution(instance, greedy, alpha, beta, source="bp:greedy", iteration=state.t),
        make_solution(instance, on_y, alpha, beta, source="bp:mwm-y", iteration=state.t),
        make_solution(instance, on_z, alpha, beta, source="bp:mwm-z", iteration=state.t),
    ]


def _round(
    state: BpState,
    instance: ProblemInstance,
    cfg: BpConfig,
    report: SolveReport,
    residual: float,
    truth: Optional[List[int]],
    on_iteration: Optional[IterationCallback],
) -> None:
    candidates = decode(state, instance, cfg.alpha, cfg.beta)
    for c in candidates:
        log.debug("t=%d %s objective=%.12g weight=%.12g overlap=%d",
                  state.t, c.source, c.objective, c.weight, c.overlaps)
        report.offer(c)
    # first of the best wins: greedy, then mwm-y, then mwm-z
    top = max(candidates, key=lambda c: c.objective)
    record = IterationRecord(
        iteration=state.t,
        lower_bound=top.objective,
        weight=top.weight,
        overlap=top.overlaps,
        residual=residual,
        recovery=recovery_fraction(top.selected, truth) if truth else None,
    )
    report.records.append(record)
    if on_iteration:
        on_iteration(record)


def run_bp(
    instance: ProblemInstance,
    cfg: BpConfig,
    truth: Optional[Iterable[int]] = None,
    on_iteration: Optional[IterationCallback] = None,
) -> SolveReport:
    started = time.perf_counter()
    truth_list = list(truth) if truth is not None else None
    report = SolveReport(solver="bp", config=cfg.snapshot())
    log.info("bp start: %s alpha=%g beta=%g gamma=%g damping=%s",
             instance.describe(), cfg.alpha, cfg.beta, cfg.gamma, cfg.damping_mode.value)

    state = BpState.zeros(instance)
    seen: deque = deque(maxlen=cfg.oscillation_window)
    residual = float("inf")
    rounded_at = -1

    for t in range(1, cfg.max_iters + 1):
        new_state = _damp_state(state, bp_step(state, instance, cfg.alpha, cfg.beta), cfg)
        residual = new_state.change_from(state)
        state = new_state
        report.iterations_run = t

        if t % cfg.rounding_cadence == 0:
            _round(state, instance, cfg, report, residual, truth_list, on_iteration)
            rounded_at = t

        if residual < cfg.tolerance:
            report.stop_reason = StopReason.CONVERGED
            break

        # a greedy set that comes back after changing is a cycle; a set
        # repeating itself in consecutive steps is not
        key = greedy_selection(state, instance).tobytes()
        if cfg.stop_on_oscillation and seen and key != seen[-1] and key in seen:
            log.info("bp: greedy matching oscillates at t=%d, stopping", t)
            report.stop_reason = StopReason.OSCILLATION
            break
        seen.append(key)

    if rounded_at != state.t:
        _round(state, instance, cfg, report, residual, truth_list, on_iteration)

    report.wall_time = time.perf_counter() - started
    if report.best is not None:
        log.info("bp done: %d iterations (%s), best objective %.12g from %s at t=%d",
                 report.iterations_run, report.stop_reason.value, report.best.objective,
                 report.best.source, report.best.iteration)
    return report


class BpSolver(Solver):
    def name(self) -> str:
        return "bp"

    def build_config(self, params: Mapping[str, Any], defaults: Mapping[str, Any]) -> BpConfig:
        return bp_config(params, defaults)

    def solve(
        self,
        instance: ProblemInstance,
        config: BpConfig,
        truth: Optional[Iterable[int]] = None,
        on_iteration: Optional[IterationCallback] = None,
    ) -> SolveReport:
        return run_bp(instance, config, truth=truth, on_iteration=on_iteration)


register_solver(BpSolver())
