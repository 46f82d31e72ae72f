# core/interfaces.py
"""
Stable abstractions the rest of the toolkit depends on.
The orchestrator and the CLI import only these contracts, never a concrete
solver or generator module's internals.

- Solver: turns a ProblemInstance plus a validated config into a SolveReport.
- Generator: builds a synthetic GeneratedInstance from a validated config.
- TraceWriter / SummaryWriter: any object with a compatible `write` method.
New solvers and generators plug in by implementing these and registering
themselves (see core.registry).
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Iterable, Mapping, Optional, Protocol

from .instance import ProblemInstance
from .models import GeneratedInstance, IterationRecord, SolveReport, SolverConfig

__all__ = ["Solver", "Generator", "TraceWriter", "SummaryWriter", "IterationCallback"]

# on_iteration(record) is called after every recorded iteration
IterationCallback = Callable[[IterationRecord], None]


class Solver(ABC):
    """
    One network alignment heuristic or bound method. Implementations are stateless;
    every run owns its own state.
    """

    @abstractmethod
    def name(self) -> str:
        """Stable id used on the command line and in reports, e.g. "bp"."""
        raise NotImplementedError

    @abstractmethod
    def build_config(self, params: Mapping[str, Any], defaults: Mapping[str, Any]) -> SolverConfig:
        """
        Validate raw parameters (CLI flags, sweep cells) into this solver's
        config type. `defaults` is the loaded app config (iteration budgets,
        tolerance, threads). Must raise InvalidConfigError on bad values.
        """
        raise NotImplementedError

    @abstractmethod
    def solve(
        self,
        instance: ProblemInstance,
        config: SolverConfig,
        truth: Optional[Iterable[int]] = None,
        on_iteration: Optional[IterationCallback] = None,
    ) -> SolveReport:
        """
        Run to completion and return the report. With `truth`, every trace
        record carries the recovery fraction of that iteration's solution.
        """
        raise NotImplementedError


class Generator(ABC):
    """Synthetic instance family with a planted correct matching."""

    @abstractmethod
    def name(self) -> str:
        raise NotImplementedError

    @abstractmethod
    def build_config(self, params: Mapping[str, Any]) -> Any:
        """Validate raw parameters into this generator's config dataclass."""
        raise NotImplementedError

    @abstractmethod
    def generate(self, config: Any) -> GeneratedInstance:
        raise NotImplementedError


class TraceWriter(Protocol):
    """Sink for a single solver report (per-iteration trace)."""

    def write(self, report: SolveReport) -> None:
        ...


class SummaryWriter(Protocol):
    """Sink for sweep summary rows (one dict per parameter combination)."""

    def write(self, rows: Iterable[Dict[str, Any]]) -> None: ...
