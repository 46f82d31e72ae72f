# infra/exporters.py
"""
Writers for solver reports and sweep summaries.

Exports:
- CSV trace: one row per recorded iteration
  iteration,lower_bound,upper_bound,weight,overlap,residual,recovery
  (upper_bound empty for BP/SpaIsoRank, recovery empty without truth)
- CSV summary: one row per sweep combination
- JSON summary: run header (config snapshot included) plus the summary rows

Usage:
    from infra.exporters import TraceCsvWriter, SummaryCsvWriter, JsonSummaryWriter
    TraceCsvWriter("trace.csv").write(report)
    SummaryCsvWriter("summary.csv").write(rows)
    JsonSummaryWriter("summary.json").write(payload)

Floats are written with 17 significant digits; all writes are atomic.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, Iterable, List

import pandas as pd

from core.interfaces import SummaryWriter, TraceWriter
from core.models import SolveReport
from utils.path_utils import atomic_writer

__all__ = [
    "TRACE_COLUMNS",
    "trace_frame",
    "TraceCsvWriter",
    "SummaryCsvWriter",
    "JsonSummaryWriter",
]

TRACE_COLUMNS: List[str] = [
    "iteration",
    "lower_bound",
    "upper_bound",
    "weight",
    "overlap",
    "residual",
    "recovery",
]

_FLOAT_FORMAT = "%.17g"


def trace_frame(report: SolveReport) -> pd.DataFrame:
    frame = pd.DataFrame([asdict(r) for r in report.records], columns=TRACE_COLUMNS)
    frame["iteration"] = frame["iteration"].astype("int64")
    frame["overlap"] = frame["overlap"].astype("int64")
    return frame


def _write_frame(frame: pd.DataFrame, path: Path) -> None:
    with atomic_writer(path, newline="") as fp:
        frame.to_csv(fp, index=False, float_format=_FLOAT_FORMAT, na_rep="", lineterminator="\n")


class TraceCsvWriter(TraceWriter):
    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def write(self, report: SolveReport) -> None:
        _write_frame(trace_frame(report), self.path)


class SummaryCsvWriter(SummaryWriter):
    """
    Writes one row per run; columns are the union of the row keys, in
    first-seen order.
    """
    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def write(self, rows: Iterable[Dict[str, Any]]) -> None:
        rows = list(rows)
        columns: List[str] = []
        for row in rows:
            columns.extend(k for k in row if k not in columns)
        _write_frame(pd.DataFrame(rows, columns=columns), self.path)


class JsonSummaryWriter:
    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def write(self, payload: Dict[str, Any]) -> None:
        with atomic_writer(self.path, newline="\n") as fp:
            fp.write(json.dumps(payload, ensure_ascii=False, indent=2, default=str))
            fp.write("\n")
