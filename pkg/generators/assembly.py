# generators/assembly.py
"""
Shared last step of the synthetic families: from a base graph, two
perturbed copies and a bag of noisy candidate pairs, build the
ProblemInstance and the planted (correct) edge set.

Coordinates: everything is produced in A's labels; B's labels are applied
at the end through `perm` (vertex a of the base graph is perm[a] in B).
"""

from __future__ import annotations

from typing import Any, Dict, Sequence, Tuple

import numpy as np

from core.instance import CandidateGraph, ProblemInstance, SimpleGraph
from core.models import GeneratedInstance

from .distances import perturbation_edges

__all__ = ["perturbed_copy", "assemble"]


def perturbed_copy(
    n: int, u: np.ndarray, v: np.ndarray, dist: np.ndarray, q: float, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Base edges plus perturbation edges, as (u < v) arrays."""
    pu, pv = perturbation_edges(dist, q, rng)
    return np.concatenate([u, pu]), np.concatenate([v, pv])


def assemble(
    n: int,
    a_edges: Tuple[np.ndarray, np.ndarray],
    b_edges: Tuple[np.ndarray, np.ndarray],
    noise: Sequence[Tuple[np.ndarray, np.ndarray]],
    perm: np.ndarray,
    rng: np.random.Generator,
    name: str,
    metadata: Dict[str, Any],
) -> GeneratedInstance:
    """
    Correct pairs (i, i) get weight 1; every other distinct noise pair gets a
    uniform [0, 1) weight drawn in sorted pair order.
    """
    a = SimpleGraph.from_edges(n, zip(a_edges[0].tolist(), a_edges[1].tolist()))
    bu, bv = perm[b_edges[0]], perm[b_edges[1]]
    b = SimpleGraph.from_edges(n, zip(bu.tolist(), bv.tolist()))

    if noise:
        na = np.concatenate([p[0] for p in noise])
        nb = np.concatenate([p[1] for p in noise])
    else:
        na = nb = np.zeros(0, dtype=np.int64)
    keys = np.unique(na * n + nb) if n else np.zeros(0, dtype=np.int64)
    na, nb = keys // max(n, 1), keys % max(n, 1)
    off = na != nb
    na, nb = na[off], nb[off]
    noise_w = rng.random(na.size)

    correct = np.arange(n, dtype=np.int64)
    ei = np.concatenate([correct, na])
    ej = perm[np.concatenate([correct, nb])]
    w = np.concatenate([np.ones(n), noise_w])
    L = CandidateGraph.from_arrays(n, n, ei, ej, w)

    instance = ProblemInstance(A=a, B=b, L=L, name=name)
    truth = tuple(sorted(L.edge_index(i, int(perm[i])) for i in range(n)))
    meta = dict(metadata)
    meta.update(instance.describe())
    meta["noise_edges"] = int(na.size)
    return GeneratedInstance(instance=instance, truth=truth, metadata=meta)
