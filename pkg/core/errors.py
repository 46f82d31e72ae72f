# core/errors.py
"""
Exception vocabulary shared by every layer (models, solvers, io, cli).

The orchestrator turns these into structured run outcomes and the CLI maps
those to exit codes, so raise the most specific class that fits.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

__all__ = [
    "NetAlignError",
    "InvalidInstanceError",
    "InvalidConfigError",
    "FeasibilityError",
    "UndefinedMetricError",
    "OracleScaleError",
    "InvalidSeedError",
    "SmatParseError",
    "SolverFailure",
]


class NetAlignError(Exception):
    """Base class for all toolkit errors."""


class InvalidInstanceError(NetAlignError, ValueError):
    """Graphs or candidate edges are malformed (range, duplicates, self loops, dimensions)."""


class InvalidConfigError(NetAlignError, ValueError):
    """Solver/generator parameters out of their allowed ranges."""


class FeasibilityError(NetAlignError, ValueError):
    """A selection of candidate edges is not a matching."""

    def __init__(self, message: str, violations: Optional[dict] = None) -> None:
        super().__init__(message)
        self.violations = dict(violations or {})


class UndefinedMetricError(NetAlignError, ValueError):
    """A metric was requested on data where it has no value (e.g. empty truth)."""


class OracleScaleError(NetAlignError, ValueError):
    """An exhaustive oracle was asked to run beyond its size cap."""


class InvalidSeedError(NetAlignError, ValueError):
    """SpaIsoRank needs at least one positive match weight to build its teleport vector."""


class SmatParseError(NetAlignError, ValueError):
    """A sparse triplet file could not be parsed; carries the offending line."""

    def __init__(self, path: Path | str, line_no: int, message: str) -> None:
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = Path(path)
        self.line_no = line_no


class SolverFailure(NetAlignError, RuntimeError):
    """Unexpected failure inside a solver run (not caused by bad input)."""
