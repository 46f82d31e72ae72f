# core/models.py
"""
Plain data shapes for solutions, solver settings and run reports
(no numerics, no parsing, no I/O).

Graphs, the candidate graph L and the derived matrices live in core.instance
because they carry their own construction rules; everything a solver hands
back to the rest of the toolkit is defined here.

Design goals:
- Immutable where it matters: a solution or an iteration record is
  historical truth once produced.
- SolveReport is mutable on purpose: a solver appends to it while it runs,
  the same way the orchestrator fills an aggregate report.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Dict, FrozenSet, List, Optional, Tuple

from .errors import InvalidConfigError

if TYPE_CHECKING:
    from .instance import ProblemInstance


class DampingMode(Enum):
    """How new BP messages are blended with the previous iterate."""
    POWER = "power"          # weight gamma**t on the new messages
    CONSTANT = "constant"    # weight gamma on the new messages


class StepSchedule(Enum):
    """Subgradient step policy for the matching relaxation."""
    CONSTANT = "constant"
    HALVING = "halving"


class StopReason(Enum):
    MAX_ITERS = "max_iters"
    CONVERGED = "converged"
    OSCILLATION = "oscillation"
    GAP_CLOSED = "gap_closed"


@dataclass(frozen=True)
class AlignmentSolution:
    """
    A feasible matching in L, scored under the (alpha, beta) it was found with.

    Fields:
    - selected: canonical edge indices, ascending.
    - weight: sum of w over selected edges.
    - overlaps: number of squares, (1/2) x^T S x, exact integer.
    - alpha, beta: the objective coefficients used for `objective`.
    - source: solver id plus candidate kind, e.g. "bp:mwm-y".
    - iteration: solver iteration that produced the candidate (0 = not iterative).
    """
    selected: Tuple[int, ...]
    weight: float
    overlaps: int
    alpha: float
    beta: float
    source: str = ""
    iteration: int = 0

    @property
    def objective(self) -> float:
        return self.objective_for(self.alpha, self.beta)

    def objective_for(self, alpha: float, beta: float) -> float:
        return alpha * self.weight + beta * self.overlaps

    @property
    def edge_set(self) -> FrozenSet[int]:
        return frozenset(self.selected)

    def __len__(self) -> int:
        return len(self.selected)


@dataclass(frozen=True)
class SolverConfig:
    """
    Parameters shared by all solvers.

    gamma is the damping factor for BP, the subgradient step for MR and the
    teleport damping for SpaIsoRank; each solver config narrows its range.
    """
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 0.99
    max_iters: int = 100
    tolerance: float = 1e-8
    seed: int = 0

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.alpha < 0 or self.beta < 0:
            raise InvalidConfigError("alpha and beta must be nonnegative")
        if self.alpha == 0 and self.beta == 0:
            raise InvalidConfigError("alpha and beta cannot both be zero")
        if not 0.0 <= self.gamma <= 1.0:
            raise InvalidConfigError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.max_iters < 1:
            raise InvalidConfigError("max_iters must be at least 1")
        if not self.tolerance > 0:
            raise InvalidConfigError("tolerance must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidConfigError("seed must be a 64-bit unsigned integer")

    @classmethod
    def overlap_only(cls, **kwargs: Any) -> "SolverConfig":
        """alpha=0, beta=1: the pure overlap graph matching problem."""
        return cls(alpha=0.0, beta=1.0, **kwargs)

    def snapshot(self) -> Dict[str, Any]:
        out = asdict(self)
        for key, value in out.items():
            if isinstance(value, Enum):
                out[key] = value.value
        return out


@dataclass(frozen=True)
class BpConfig(SolverConfig):
    gamma: float = 0.999
    damping_mode: DampingMode = DampingMode.POWER
    oscillation_window: int = 10
    rounding_cadence: int = 1
    stop_on_oscillation: bool = True

    def validate(self) -> None:
        super().validate()
        if self.oscillation_window < 2:
            raise InvalidConfigError("oscillation_window must be at least 2")
        if self.rounding_cadence < 1:
            raise InvalidConfigError("rounding_cadence must be at least 1")


@dataclass(frozen=True)
class MrConfig(SolverConfig):
    gamma: float = 0.4
    max_iters: int = 1000
    step_schedule: StepSchedule = StepSchedule.CONSTANT
    stall_window: int = 100
    threads: int = 1

    def validate(self) -> None:
        super().validate()
        if self.stall_window < 1:
            raise InvalidConfigError("stall_window must be at least 1")
        if self.threads < 1:
            raise InvalidConfigError("threads must be at least 1")


@dataclass(frozen=True)
class IsoRankConfig(SolverConfig):
    gamma: float = 0.95
    tolerance: float = 1e-12
    rounding_cadence: int = 1

    def validate(self) -> None:
        super().validate()
        if self.gamma >= 1.0:
            raise InvalidConfigError("SpaIsoRank needs gamma < 1")
        if self.rounding_cadence < 1:
            raise InvalidConfigError("rounding_cadence must be at least 1")


@dataclass(frozen=True)
class ExhaustiveConfig(SolverConfig):
    """Exhaustive search; `cap` is the largest |E_L| it accepts."""
    cap: int = 20

    def validate(self) -> None:
        super().validate()
        if self.cap < 0:
            raise InvalidConfigError("cap must be nonnegative")


@dataclass(frozen=True)
class IterationRecord:
    """One row of a solver trace."""
    iteration: int
    lower_bound: float
    weight: float
    overlap: int
    upper_bound: Optional[float] = None
    residual: Optional[float] = None
    recovery: Optional[float] = None


@dataclass
class SolveReport:
    """
    Per-iteration trace plus the best iterate ever generated.
    Solvers append records and offer candidates while they run.
    """
    solver: str
    config: Dict[str, Any] = field(default_factory=dict)
    records: List[IterationRecord] = field(default_factory=list)
    best: Optional[AlignmentSolution] = None
    best_upper: Optional[float] = None
    iterations_run: int = 0
    stop_reason: StopReason = StopReason.MAX_ITERS
    wall_time: float = 0.0

    def offer(self, candidate: AlignmentSolution) -> bool:
        """Keep `candidate` if it beats the current best; ties keep the earlier one."""
        if self.best is None or candidate.objective > self.best.objective:
            self.best = candidate
            return True
        return False

    def offer_upper(self, value: float) -> None:
        if self.best_upper is None or value < self.best_upper:
            self.best_upper = value

    @property
    def gap(self) -> Optional[float]:
        if self.best_upper is None or self.best is None:
            return None
        return self.best_upper - self.best.objective


@dataclass(frozen=True)
class GeneratedInstance:
    """A synthetic instance plus its planted correct matching."""
    instance: "ProblemInstance"
    truth: Tuple[int, ...]
    metadata: Dict[str, Any] = field(default_factory=dict)
