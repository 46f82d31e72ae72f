# app/cli.py
"""
Command-line entry point.

Flow:
1) Parse flags (unknown flags and malformed values are rejected up front).
2) Configure logging + load config.
3) Import solvers/generators (self-register into the registry).
4) Hand the run to the orchestrator and map its outcome to an exit code:
   0 ok, 2 invalid input, 3 solver failure, 4 infeasible solution.

Run:
    python app/cli.py generate --generator grid --k 20 --noise 5 --seed 1 --out bundles/g1
    python app/cli.py solve bundles/g1 --solver bp --alpha 1 --beta 2 --out trace.csv
    python app/cli.py sweep bundles --solver bp --gamma 0.9,0.99,0.999 --beta 1,2 --out sweep/
    python app/cli.py eval bundles/g1 --solution sol.txt
"""
from __future__ import annotations
# --- ensure project root is on sys.path ---
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]  # one level up from /app
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))
# ------------------------------------------

import argparse
import logging
from typing import Any, Dict, List, Optional, Sequence

from infra.config_loader import load_config, split_list
from infra.logging_config import configure_logging
from services.orchestrator import Orchestrator, RunOutcome
from utils.path_utils import MANIFEST_NAME, iter_bundle_dirs

# Import solvers/generators so they self-register with the registry on import.
import solvers.bp          # noqa: F401
import solvers.mr          # noqa: F401
import solvers.isorank     # noqa: F401
import solvers.exhaustive  # noqa: F401
import generators.grid      # noqa: F401
import generators.powerlaw  # noqa: F401

log = logging.getLogger("netalign.cli")

EXIT_USAGE = 2

SOLVER_CHOICES = ("bp", "mr", "isorank", "exhaustive")

# flag dest -> solver parameter key
_SOLVER_PARAMS = (
    "alpha", "beta", "gamma", "iters", "tol", "seed",
    "damping", "mr_step_schedule", "cadence", "window", "stall_window", "threads",
)

# flag dest -> generator parameter key
_GENERATOR_PARAMS = {
    "k": "k",
    "n": "n",
    "theta": "theta",
    "noise": "noise_expected_degree",
    "q": "q",
    "d": "d",
    "local_noise_p": "local_noise_p",
    "mean_degree": "mean_degree",
    "seed": "seed",
}


# ----------------- parser -----------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    p.add_argument("--no-log-file", action="store_true", help="log to the console only")


def _add_solver_flags(p: argparse.ArgumentParser, listed: bool) -> None:
    """Solver flags; in sweep mode every flag takes a comma-separated list."""
    num = split_list if listed else float
    whole = split_list if listed else int
    text = split_list if listed else str
    p.add_argument("--solver", required=True, choices=SOLVER_CHOICES)
    p.add_argument("--alpha", type=num)
    p.add_argument("--beta", type=num)
    p.add_argument("--gamma", type=num, help="damping (BP), step (MR) or mixing (SpaIsoRank)")
    p.add_argument("--iters", type=whole)
    p.add_argument("--tol", type=num)
    p.add_argument("--seed", type=whole)
    damping = {} if listed else {"choices": ("power", "constant")}
    p.add_argument("--damping", type=text, **damping)
    schedule = {} if listed else {"choices": ("constant", "halving")}
    p.add_argument("--mr-step-schedule", dest="mr_step_schedule", type=text, **schedule)
    p.add_argument("--cadence", type=whole, help="round every N iterations")
    p.add_argument("--window", type=whole, help="BP oscillation window")
    p.add_argument("--stall-window", dest="stall_window", type=whole,
                   help="MR iterations without a better upper bound before the step halves")
    p.add_argument("--threads", type=whole, help="MR row-matching threads")
    p.add_argument("--truth", type=Path, help="truth file overriding the bundle's")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netalign",
        description="Sparse network alignment: generate instances, run solvers, evaluate matchings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic instance bundle")
    gen.add_argument("--generator", choices=("grid", "powerlaw"), default="grid")
    gen.add_argument("--k", type=int, help="grid side length")
    gen.add_argument("--n", type=int, help="power-law vertex count")
    gen.add_argument("--theta", type=float, help="power-law exponent")
    gen.add_argument("--noise", type=float, help="expected uniform noise degree")
    gen.add_argument("--q", type=float, help="perturbation strength")
    gen.add_argument("--d", type=int, help="local noise radius (grid)")
    gen.add_argument("--local-noise-p", dest="local_noise_p", type=float)
    gen.add_argument("--mean-degree", dest="mean_degree", type=float)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--no-shuffle", action="store_true", help="keep B labels aligned with A")
    gen.add_argument("--out", type=Path, required=True, help="bundle directory")
    _add_common(gen)

    solve = sub.add_parser("solve", help="run one solver on one bundle")
    solve.add_argument("bundle", type=Path)
    _add_solver_flags(solve, listed=False)
    solve.add_argument("--out", type=Path, required=True, help="trace CSV path")
    solve.add_argument("--solution", type=Path, help="write the best matching here")
    solve.add_argument("--summary", type=Path, help="write a JSON summary here")
    _add_common(solve)

    sweep = sub.add_parser("sweep", help="run a parameter grid over one or more bundles")
    sweep.add_argument("bundles", nargs="+", type=Path, help="bundle directories or folders of bundles")
    _add_solver_flags(sweep, listed=True)
    sweep.add_argument("--out", type=Path, required=True, help="output directory")
    _add_common(sweep)

    ev = sub.add_parser("eval", help="score a solution file against a bundle")
    ev.add_argument("bundle", type=Path)
    ev.add_argument("--solution", type=Path, required=True)
    ev.add_argument("--truth", type=Path)
    ev.add_argument("--alpha", type=float, default=1.0)
    ev.add_argument("--beta", type=float, default=1.0)
    _add_common(ev)
    return parser


# ----------------- commands -----------------

def cmd_generate(args: argparse.Namespace, orchestrator: Orchestrator) -> int:
    params: Dict[str, Any] = {
        key: getattr(args, dest) for dest, key in _GENERATOR_PARAMS.items()
        if getattr(args, dest) is not None
    }
    if args.no_shuffle:
        params["shuffle_b"] = False
    outcome = orchestrator.run_generate(args.generator, params, args.out)
    if outcome.ok:
        print(f"bundle: {outcome.outputs[0]}")
        _print_data(outcome.data)
    return _finish(outcome)


def cmd_solve(args: argparse.Namespace, orchestrator: Orchestrator) -> int:
    params = {key: getattr(args, key) for key in _SOLVER_PARAMS if getattr(args, key) is not None}
    outcome = orchestrator.run_solve(
        args.bundle,
        args.solver,
        params,
        trace_path=args.out,
        truth_path=args.truth,
        solution_path=args.solution,
        summary_path=args.summary,
    )
    if outcome.ok:
        print(_summary_line(outcome.data))
    return _finish(outcome)


def cmd_sweep(args: argparse.Namespace, orchestrator: Orchestrator) -> int:
    grid = {key: getattr(args, key) for key in _SOLVER_PARAMS if getattr(args, key) is not None}
    outcome = orchestrator.run_sweep(
        _expand_bundles(args.bundles),
        args.solver,
        grid,
        args.out,
        truth_path=args.truth,
    )
    if outcome.ok:
        print(f"runs: {outcome.data['runs']}")
        print(f"summary: {outcome.data['summary']}")
    return _finish(outcome)


def cmd_eval(args: argparse.Namespace, orchestrator: Orchestrator) -> int:
    outcome = orchestrator.run_eval(
        args.bundle,
        args.solution,
        truth_path=args.truth,
        alpha=args.alpha,
        beta=args.beta,
    )
    _print_data(outcome.data)
    return _finish(outcome)


_COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "eval": cmd_eval,
}


# ----------------- helpers -----------------

def _expand_bundles(paths: Sequence[Path]) -> List[Path]:
    """A folder without its own manifest stands for every bundle below it."""
    out: List[Path] = []
    for p in paths:
        if p.is_dir() and not (p / MANIFEST_NAME).exists():
            found = list(iter_bundle_dirs(p))
            out.extend(found if found else [p])
        else:
            out.append(p)
    return out


def _summary_line(data: Dict[str, Any]) -> str:
    parts = [
        f"objective={data['best_objective']:.10g}",
        f"weight={data['best_weight']:.10g}",
        f"overlap={data['best_overlap']}",
    ]
    if data.get("best_upper") is not None:
        parts.append(f"upper={data['best_upper']:.10g}")
    parts.append(f"iterations={data['iterations']}")
    parts.append(f"stop={data['stop_reason']}")
    if data.get("recovery") is not None:
        parts.append(f"recovery={data['recovery']:.6g}")
    parts.append(f"wall_time={data['wall_time']:.3f}s")
    return " ".join(parts)


def _print_data(data: Dict[str, Any]) -> None:
    for key, value in data.items():
        print(f"{key}: {value}")


def _finish(outcome: RunOutcome) -> int:
    if not outcome.ok:
        print(f"error ({outcome.status.value}): {outcome.message}", file=sys.stderr)
    return outcome.exit_code


def _progress(current: int, total: int, label: str) -> None:
    log.info("run %d/%d done (%s)", current, total, label)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0; every parse error is a usage error
        return EXIT_USAGE if exc.code else 0

    config = load_config()
    configure_logging(
        level_name=args.log_level or config["log_level"],
        log_dir=None if args.no_log_file else config["log_dir"],
        log_to_file=config["log_to_file"] and not args.no_log_file,
    )
    orchestrator = Orchestrator(config=config, on_progress=_progress)
    return _COMMANDS[args.command](args, orchestrator)


if __name__ == "__main__":
    sys.exit(main())
