# infra/bundle.py
"""
Instance bundles and the small text files that travel with them.

A bundle is a directory with a manifest.json:

    {
      "a_graph": "A.smat",
      "b_graph": "B.smat",
      "l_graph": "L.smat",
      "truth": "truth.txt",        (optional)
      "metadata": {...},           (optional)
      "triangular": false          (optional)
    }

Graph files store each undirected edge in both directions unless the
manifest says "triangular": true, in which case each edge appears once.

Truth files list one canonical edge index per line. Solution files list
one "i j" vertex pair per line, so they stay valid if L is re-ordered.
Lines starting with "#" are comments in both.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from core.errors import InvalidInstanceError
from core.instance import CandidateGraph, ProblemInstance, SimpleGraph
from core.models import GeneratedInstance
from utils.path_utils import MANIFEST_NAME, atomic_write_text

from .smat import SmatMatrix, read_smat, write_smat

__all__ = [
    "Bundle",
    "graph_from_smat",
    "graph_to_smat",
    "candidate_from_smat",
    "candidate_to_smat",
    "read_bundle",
    "write_bundle",
    "read_truth",
    "write_truth",
    "read_solution",
    "write_solution",
]

log = logging.getLogger(__name__)

TRUTH_HEADER = "# correct edge indices, one per line, against L in canonical (i, i') order"
SOLUTION_HEADER = "# matched vertex pairs: i j (zero-based, A then B)"


@dataclass(frozen=True)
class Bundle:
    instance: ProblemInstance
    truth: Optional[Tuple[int, ...]] = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    path: Optional[Path] = None


# ---------- graphs <-> smat ----------

def graph_from_smat(m: SmatMatrix, triangular: bool = False, name: str = "graph") -> SimpleGraph:
    if m.rows != m.cols:
        raise InvalidInstanceError(f"{name}: adjacency must be square, got {m.rows}x{m.cols}")
    if np.any(m.row == m.col):
        v = int(m.row[m.row == m.col][0])
        raise InvalidInstanceError(f"{name}: self-loop at vertex {v}")
    if triangular:
        return SimpleGraph.from_edges(m.rows, zip(m.row.tolist(), m.col.tolist()))

    forward = set(zip(m.row.tolist(), m.col.tolist()))
    if len(forward) != m.nnz:
        raise InvalidInstanceError(f"{name}: duplicate entries in symmetric graph file")
    missing = [(a, b) for a, b in forward if (b, a) not in forward]
    if missing:
        a, b = min(missing)
        raise InvalidInstanceError(
            f"{name}: entry ({a}, {b}) has no mirror ({b}, {a}); mark the bundle triangular "
            "if edges are stored once"
        )
    return SimpleGraph.from_edges(m.rows, ((a, b) for a, b in forward if a < b))


def graph_to_smat(g: SimpleGraph, triangular: bool = False) -> SmatMatrix:
    if triangular:
        row, col = g.u, g.v
    else:
        row, col = np.concatenate([g.u, g.v]), np.concatenate([g.v, g.u])
    return SmatMatrix(g.vertex_count, g.vertex_count, row, col, np.ones(row.size))


def candidate_from_smat(m: SmatMatrix) -> CandidateGraph:
    return CandidateGraph.from_arrays(m.rows, m.cols, m.row, m.col, m.val)


def candidate_to_smat(L: CandidateGraph) -> SmatMatrix:
    return SmatMatrix(L.rows, L.cols, np.asarray(L.ei), np.asarray(L.ej), np.asarray(L.w))


# ---------- bundles ----------

def _manifest_path(path: Path) -> Path:
    return path / MANIFEST_NAME if path.is_dir() else path


def read_bundle(path: Path | str) -> Bundle:
    """Load a bundle from its directory or its manifest file."""
    manifest_path = _manifest_path(Path(path))
    if not manifest_path.exists():
        raise FileNotFoundError(f"no bundle manifest at {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidInstanceError(f"{manifest_path}: manifest is not valid JSON ({exc})") from exc

    missing = [key for key in ("a_graph", "b_graph", "l_graph") if key not in manifest]
    if missing:
        raise InvalidInstanceError(f"{manifest_path}: manifest lacks {', '.join(missing)}")

    base = manifest_path.parent
    triangular = bool(manifest.get("triangular", False))
    A = graph_from_smat(read_smat(base / manifest["a_graph"]), triangular, name="A")
    B = graph_from_smat(read_smat(base / manifest["b_graph"]), triangular, name="B")
    L = candidate_from_smat(read_smat(base / manifest["l_graph"]))
    metadata = dict(manifest.get("metadata") or {})
    instance = ProblemInstance(A=A, B=B, L=L, name=str(metadata.get("name", base.name)))

    truth = None
    if manifest.get("truth"):
        truth = read_truth(base / manifest["truth"], instance)
    log.info("loaded bundle %s: %s", base, instance.describe())
    return Bundle(instance=instance, truth=truth, metadata=metadata, path=base)


def write_bundle(generated: GeneratedInstance, directory: Path | str, triangular: bool = False) -> Path:
    """Write A, B, L, truth and the manifest into `directory`; returns the manifest path."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    inst = generated.instance
    write_smat(graph_to_smat(inst.A, triangular), out / "A.smat")
    write_smat(graph_to_smat(inst.B, triangular), out / "B.smat")
    write_smat(candidate_to_smat(inst.L), out / "L.smat")
    manifest: Dict[str, Any] = {
        "a_graph": "A.smat",
        "b_graph": "B.smat",
        "l_graph": "L.smat",
        "triangular": triangular,
        "metadata": {"name": inst.name, **_plain(generated.metadata)},
    }
    if generated.truth is not None:
        write_truth(generated.truth, out / "truth.txt")
        manifest["truth"] = "truth.txt"
    manifest_path = out / MANIFEST_NAME
    atomic_write_text(manifest_path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest_path


def _plain(meta: Dict[str, Any]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for key, value in meta.items():
        if isinstance(value, np.generic):
            value = value.item()
        out[key] = value
    return out


# ---------- truth / solutions ----------

def _content_lines(path: Path) -> Iterable[Tuple[int, str]]:
    with path.open("r", encoding="utf-8") as fp:
        for line_no, raw in enumerate(fp, start=1):
            line = raw.strip()
            if line and not line.startswith("#"):
                yield line_no, line


def read_truth(path: Path | str, instance: Optional[ProblemInstance] = None) -> Tuple[int, ...]:
    path = Path(path)
    out: List[int] = []
    for line_no, line in _content_lines(path):
        try:
            e = int(line)
        except ValueError:
            raise InvalidInstanceError(f"{path}:{line_no}: not an edge index: {line!r}") from None
        if instance is not None and not 0 <= e < instance.edge_count:
            raise InvalidInstanceError(f"{path}:{line_no}: edge index {e} outside L")
        out.append(e)
    return tuple(out)


def write_truth(truth: Iterable[int], path: Path | str) -> None:
    body = "".join(f"{int(e)}\n" for e in truth)
    atomic_write_text(path, TRUTH_HEADER + "\n" + body)


def read_solution(path: Path | str, instance: ProblemInstance) -> Tuple[int, ...]:
    """Edge indices of the listed pairs; a pair that is not an edge of L is an error."""
    path = Path(path)
    out: List[int] = []
    for line_no, line in _content_lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise InvalidInstanceError(f"{path}:{line_no}: expected 'i j', got {line!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise InvalidInstanceError(f"{path}:{line_no}: vertex ids must be integers") from None
        e = instance.L.edge_index(i, j)
        if e is None:
            raise InvalidInstanceError(f"{path}:{line_no}: ({i}, {j}) is not a candidate edge")
        out.append(e)
    return tuple(out)


def write_solution(selected: Iterable[int], instance: ProblemInstance, path: Path | str) -> None:
    L = instance.L
    pairs = sorted(L.edge(int(e)) for e in selected)
    body = "".join(f"{i} {j}\n" for i, j in pairs)
    atomic_write_text(path, SOLUTION_HEADER + "\n" + body)
