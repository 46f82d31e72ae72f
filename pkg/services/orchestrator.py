# services/orchestrator.py
"""
High-level coordinator: generate bundles, run solvers (single runs and
parameter sweeps), evaluate solution files.

This module depends only on:
- core.interfaces + core.models (abstractions)
- core.registry (to look plugins up by name)
- infra (bundles, exporters) and utils.path_utils

It does NOT import concrete solvers or generators; the entry point imports
them so they self-register.

Every public run_* method returns a RunOutcome instead of raising: input
problems become INVALID_INPUT, infeasible solutions INFEASIBLE, and anything
unexpected from inside a solver SOLVER_FAILURE.
"""

from __future__ import annotations

import itertools
import logging
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from core.errors import (
    FeasibilityError,
    InvalidConfigError,
    NetAlignError,
    SolverFailure,
    UndefinedMetricError,
)
from core.models import SolveReport, SolverConfig
from core.objective import (
    count_overlaps,
    make_solution,
    matching_violations,
    objective_ratio,
    recovery_fraction,
)
from core.registry import get_generator, get_solver
from infra.bundle import Bundle, read_bundle, read_solution, read_truth, write_bundle, write_solution
from infra.config_loader import load_config
from infra.exporters import JsonSummaryWriter, SummaryCsvWriter, TraceCsvWriter

log = logging.getLogger(__name__)

# on_progress(current_index, total, label)
ProgressFn = Callable[[int, int, str], None]


class RunStatus(Enum):
    OK = "ok"
    INVALID_INPUT = "invalid_input"
    SOLVER_FAILURE = "solver_failure"
    INFEASIBLE = "infeasible"


EXIT_CODES: Dict[RunStatus, int] = {
    RunStatus.OK: 0,
    RunStatus.INVALID_INPUT: 2,
    RunStatus.SOLVER_FAILURE: 3,
    RunStatus.INFEASIBLE: 4,
}


@dataclass
class RunOutcome:
    status: RunStatus = RunStatus.OK
    message: str = ""
    exception: Optional[str] = None
    data: Dict[str, Any] = field(default_factory=dict)
    outputs: List[Path] = field(default_factory=list)
    reports: List[SolveReport] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status is RunStatus.OK

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def _failure(status: RunStatus, exc: BaseException) -> RunOutcome:
    outcome = RunOutcome(
        status=status,
        message=str(exc) or exc.__class__.__name__,
        exception=exc.__class__.__name__,
    )
    violations = getattr(exc, "violations", None)
    if violations:
        outcome.data["violations"] = violations
    return outcome


def parameter_grid(grid: Mapping[str, Sequence[Any]]) -> List[Dict[str, Any]]:
    """Cartesian product of the lists in `grid`, first key varying slowest."""
    if not grid or any(len(values) == 0 for values in grid.values()):
        raise InvalidConfigError("parameter grid is empty")
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


class Orchestrator:
    """
    Coordinates runs. Stateless aside from the loaded app config and an
    optional progress callback.

    Usage:
        orchestrator = Orchestrator(on_progress=my_progress_fn)
        outcome = orchestrator.run_solve("bundles/grid-1", "bp", {"beta": 2}, "trace.csv")
    """

    def __init__(self, config: Optional[Dict[str, Any]] = None, on_progress: Optional[ProgressFn] = None) -> None:
        self.config = dict(config) if config is not None else load_config()
        self._on_progress = on_progress

    # ---------- generate ----------

    def run_generate(self, generator: str, params: Mapping[str, Any], out_dir: Path | str) -> RunOutcome:
        try:
            gen = get_generator(generator)
            cfg = gen.build_config(params)
            generated = gen.generate(cfg)
            manifest = write_bundle(generated, out_dir)
        except Exception as exc:
            return self._classify(exc)
        return RunOutcome(data=dict(generated.metadata), outputs=[manifest])

    # ---------- solve ----------

    def run_solve(
        self,
        bundle_path: Path | str,
        solver: str,
        params: Mapping[str, Any],
        trace_path: Path | str,
        truth_path: Optional[Path | str] = None,
        solution_path: Optional[Path | str] = None,
        summary_path: Optional[Path | str] = None,
    ) -> RunOutcome:
        started = datetime.now(timezone.utc)
        try:
            plugin = get_solver(solver)
            cfg = plugin.build_config(params, self.config)
            bundle = read_bundle(bundle_path)
            truth = self._truth(bundle, truth_path)
        except Exception as exc:
            return self._classify(exc)

        try:
            report = self._safe_solve(plugin, bundle, cfg, truth)
        except Exception as exc:
            return self._classify(exc, during_solve=True)

        row = self._summary_row(bundle, solver, dict(params), report, truth)
        outcome = RunOutcome(data=row, reports=[report])
        try:
            TraceCsvWriter(trace_path).write(report)
            outcome.outputs.append(Path(trace_path))
            if solution_path is not None:
                write_solution(report.best.selected, bundle.instance, solution_path)
                outcome.outputs.append(Path(solution_path))
            if summary_path is not None:
                self._write_json_summary(summary_path, started, cfg.snapshot(), [row], [report])
                outcome.outputs.append(Path(summary_path))
        except Exception as exc:
            self._discard(outcome.outputs)
            return self._classify(exc)
        outcome.data["wall_time"] = report.wall_time
        return outcome

    # ---------- sweep ----------

    def run_sweep(
        self,
        bundle_paths: Sequence[Path | str],
        solver: str,
        grid: Mapping[str, Sequence[Any]],
        out_dir: Path | str,
        truth_path: Optional[Path | str] = None,
    ) -> RunOutcome:
        """
        One run per (bundle, parameter combination). Every config is
        validated before the first solver starts; runs share a thread pool
        capped by the `threads` setting and results keep submission order.
        """
        started = datetime.now(timezone.utc)
        out = Path(out_dir)
        try:
            plugin = get_solver(solver)
            combos = parameter_grid(grid)
            configs = [plugin.build_config(c, self.config) for c in combos]
            if not bundle_paths:
                raise InvalidConfigError("no bundles to sweep over")
            bundles = [read_bundle(p) for p in bundle_paths]
            truths = [self._truth(b, truth_path) for b in bundles]
        except Exception as exc:
            return self._classify(exc)

        jobs: List[Tuple[int, Bundle, Optional[Tuple[int, ...]], Dict[str, Any], SolverConfig]] = []
        for bundle, truth in zip(bundles, truths):
            for combo, cfg in zip(combos, configs):
                jobs.append((len(jobs), bundle, truth, combo, cfg))

        total = len(jobs)
        threads = max(1, min(int(self.config.get("threads", 1)), total))
        log.info("sweep: %d bundles x %d combinations on %d threads", len(bundles), len(combos), threads)

        def run_one(job):
            index, bundle, truth, combo, cfg = job
            report = self._safe_solve(plugin, bundle, cfg, truth)
            if self._on_progress:
                self._on_progress(index + 1, total, bundle.instance.name)
            return report

        try:
            if threads > 1:
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    reports = list(pool.map(run_one, jobs))
            else:
                reports = [run_one(job) for job in jobs]
        except Exception as exc:
            return self._classify(exc, during_solve=True)

        outcome = RunOutcome(reports=reports)
        rows: List[Dict[str, Any]] = []
        try:
            for (index, bundle, truth, combo, _), report in zip(jobs, reports):
                trace = out / f"trace_{index:04d}.csv"
                TraceCsvWriter(trace).write(report)
                outcome.outputs.append(trace)
                row = self._summary_row(bundle, solver, combo, report, truth)
                row["trace"] = trace.name
                rows.append(row)
            summary = out / "summary.csv"
            SummaryCsvWriter(summary).write(rows)
            outcome.outputs.append(summary)
            summary_json = out / "summary.json"
            self._write_json_summary(summary_json, started, {"grid": {k: list(v) for k, v in grid.items()}},
                                     rows, reports)
            outcome.outputs.append(summary_json)
        except Exception as exc:
            self._discard(outcome.outputs)
            return self._classify(exc)
        outcome.data = {"runs": len(rows), "summary": str(summary)}
        return outcome

    # ---------- eval ----------

    def run_eval(
        self,
        bundle_path: Path | str,
        solution_path: Path | str,
        truth_path: Optional[Path | str] = None,
        alpha: float = 1.0,
        beta: float = 1.0,
    ) -> RunOutcome:
        try:
            SolverConfig(alpha=alpha, beta=beta)
            bundle = read_bundle(bundle_path)
            instance = bundle.instance
            truth = self._truth(bundle, truth_path)
            selected = read_solution(solution_path, instance)
        except Exception as exc:
            return self._classify(exc)

        violations = matching_violations(instance, selected)
        if violations["A"] or violations["B"]:
            return RunOutcome(
                status=RunStatus.INFEASIBLE,
                message=f"not a matching: A-vertices {violations['A']}, B-vertices {violations['B']}",
                exception=FeasibilityError.__name__,
                data={"feasible": False, "violations": violations,
                      "overlap": count_overlaps(instance, selected)},
            )

        solution = make_solution(instance, selected, alpha, beta, source="eval")
        data: Dict[str, Any] = {
            "feasible": True,
            "edges": len(solution),
            "weight": solution.weight,
            "overlap": solution.overlaps,
            "objective": solution.objective,
        }
        if truth:
            data["recovery"] = recovery_fraction(selected, truth)
            try:
                data["objective_ratio"] = objective_ratio(instance, selected, truth, alpha, beta)
            except UndefinedMetricError as exc:
                log.warning("objective ratio undefined: %s", exc)
                data["objective_ratio"] = None
        return RunOutcome(data=data)

    # ---------- helpers ----------

    @staticmethod
    def _discard(paths: List[Path]) -> None:
        """Remove outputs of a run that failed part way through writing."""
        for p in paths:
            try:
                p.unlink()
            except OSError:
                log.warning("could not remove partial output %s", p)

    @staticmethod
    def _truth(bundle: Bundle, truth_path: Optional[Path | str]) -> Optional[Tuple[int, ...]]:
        if truth_path is not None:
            return read_truth(truth_path, bundle.instance)
        return bundle.truth

    @staticmethod
    def _safe_solve(plugin, bundle: Bundle, cfg: SolverConfig, truth) -> SolveReport:
        """Run a solver; failures that are not input errors become SolverFailure."""
        try:
            return plugin.solve(bundle.instance, cfg, truth=truth)
        except NetAlignError:
            raise
        except Exception as exc:
            log.exception("solver %s crashed on %s", plugin.name(), bundle.instance.name)
            raise SolverFailure(f"{plugin.name()} failed: {exc}") from exc

    @staticmethod
    def _classify(exc: BaseException, during_solve: bool = False) -> RunOutcome:
        if isinstance(exc, FeasibilityError):
            status = RunStatus.INFEASIBLE
        elif isinstance(exc, SolverFailure):
            status = RunStatus.SOLVER_FAILURE
        elif isinstance(exc, (NetAlignError, OSError)):
            status = RunStatus.INVALID_INPUT
        else:
            status = RunStatus.SOLVER_FAILURE if during_solve else RunStatus.INVALID_INPUT
        log.error("%s: %s", status.value, exc)
        return _failure(status, exc)

    @staticmethod
    def _summary_row(
        bundle: Bundle,
        solver: str,
        params: Dict[str, Any],
        report: SolveReport,
        truth: Optional[Tuple[int, ...]],
    ) -> Dict[str, Any]:
        best = report.best
        row: Dict[str, Any] = {"instance": bundle.instance.name, "solver": solver}
        row.update({k: (v.value if isinstance(v, Enum) else v) for k, v in params.items()})
        row.update({
            "best_objective": best.objective,
            "best_weight": best.weight,
            "best_overlap": best.overlaps,
            "best_upper": report.best_upper,
            "best_iteration": best.iteration,
            "iterations": report.iterations_run,
            "stop_reason": report.stop_reason.value,
        })
        if truth:
            row["recovery"] = recovery_fraction(best.selected, truth)
            try:
                row["objective_ratio"] = objective_ratio(
                    bundle.instance, best.selected, truth, best.alpha, best.beta
                )
            except UndefinedMetricError:
                row["objective_ratio"] = None
        return row

    def _write_json_summary(
        self,
        path: Path | str,
        started: datetime,
        config_snapshot: Dict[str, Any],
        rows: List[Dict[str, Any]],
        reports: List[SolveReport],
    ) -> None:
        payload = {
            "schema_version": "1.0",
            "run_id": str(uuid.uuid4()),
            "started_at_utc": started.isoformat(),
            "finished_at_utc": datetime.now(timezone.utc).isoformat(),
            "config_snapshot": config_snapshot,
            "app_config": self.config,
            "runs": [
                {**row, "wall_time": rep.wall_time, "solver_config": rep.config}
                for row, rep in zip(rows, reports)
            ],
        }
        JsonSummaryWriter(path).write(payload)
