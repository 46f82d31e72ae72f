# generators/distances.py
"""
Hop distances and the distance-driven noise used by the synthetic families.

All functions take an explicit numpy Generator so a whole instance is one
reproducible stream.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

__all__ = ["hop_distances", "perturbation_edges", "local_noise_pairs", "uniform_noise_pairs"]


def hop_distances(n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Dense n x n unweighted shortest-path lengths (inf when unreachable)."""
    if n == 0:
        return np.zeros((0, 0))
    adj = sp.csr_matrix((np.ones(u.size), (u, v)), shape=(n, n))
    return shortest_path(adj, directed=False, unweighted=True)


def perturbation_edges(dist: np.ndarray, q: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    New edges u < v, each non-adjacent reachable pair added with probability
    min(1, q / d(u, v)^2).
    """
    n = dist.shape[0]
    if q <= 0 or n < 2:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    iu, iv = np.triu_indices(n, k=1)
    d = dist[iu, iv]
    eligible = np.isfinite(d) & (d >= 2)
    iu, iv, d = iu[eligible], iv[eligible], d[eligible]
    p = np.minimum(1.0, q / d ** 2)
    hit = rng.random(d.size) < p
    return iu[hit].astype(np.int64), iv[hit].astype(np.int64)


def uniform_noise_pairs(n: int, p: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Pairs (a, b), a != b, each present independently with probability p."""
    if p <= 0 or n == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    mask = rng.random((n, n)) < min(1.0, p)
    np.fill_diagonal(mask, False)
    a, b = np.nonzero(mask)
    return a.astype(np.int64), b.astype(np.int64)


def local_noise_pairs(
    dist: np.ndarray, radius: float, p: float, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Around every planted pair (i, i): each (j, j') with d(i, j) <= radius and
    d(i, j') <= radius, j != j', is added with probability p (one independent
    trial per centre i).
    """
    n = dist.shape[0]
    if p <= 0 or n == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    out_a, out_b = [], []
    for i in range(n):
        near = np.nonzero(dist[i] <= radius)[0]
        ja, jb = np.meshgrid(near, near, indexing="ij")
        ja, jb = ja.ravel(), jb.ravel()
        off = ja != jb
        ja, jb = ja[off], jb[off]
        hit = rng.random(ja.size) < p
        out_a.append(ja[hit])
        out_b.append(jb[hit])
    return np.concatenate(out_a).astype(np.int64), np.concatenate(out_b).astype(np.int64)
