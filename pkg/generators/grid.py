# generators/grid.py
"""
Perturbed grid pairs.

A and B start as copies of a k x k grid. Each copy independently gains
edges u-v with probability min(1, q / d(u, v)^2), d the grid distance.
L holds the k^2 correct pairs (weight 1), uniform noise pairs with
probability noise_expected_degree / k^2 each, and local noise: around every
correct pair, pairs of vertices within distance d of its endpoints, each
with probability local_noise_p. B's labels are shuffled unless
shuffle_b=False.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any, Mapping

import networkx as nx
import numpy as np

from core.errors import InvalidConfigError
from core.interfaces import Generator
from core.models import GeneratedInstance
from core.registry import register_generator

from .assembly import assemble, perturbed_copy
from .distances import hop_distances, local_noise_pairs, uniform_noise_pairs

__all__ = ["GridGenConfig", "gen_grid", "grid_edges", "GridGenerator"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridGenConfig:
    k: int = 20
    noise_expected_degree: float = 0.0
    q: float = 2.0
    d: int = 1
    local_noise_p: float = 0.2
    seed: int = 0
    shuffle_b: bool = True

    def __post_init__(self) -> None:
        if self.k < 2:
            raise InvalidConfigError("grid side k must be at least 2")
        if self.noise_expected_degree < 0 or self.q < 0 or self.d < 0:
            raise InvalidConfigError("noise, q and d must be nonnegative")
        if not 0.0 <= self.local_noise_p <= 1.0:
            raise InvalidConfigError("local_noise_p must lie in [0, 1]")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidConfigError("seed must be a 64-bit unsigned integer")


def grid_edges(k: int):
    """k x k grid as (n, u, v) with integer labels row * k + col and u < v."""
    g = nx.convert_node_labels_to_integers(nx.grid_2d_graph(k, k), ordering="sorted")
    pairs = np.array(sorted((min(a, b), max(a, b)) for a, b in g.edges()), dtype=np.int64)
    return g.number_of_nodes(), pairs[:, 0], pairs[:, 1]


def gen_grid(cfg: GridGenConfig) -> GeneratedInstance:
    rng = np.random.default_rng(cfg.seed)
    n, u, v = grid_edges(cfg.k)
    dist = hop_distances(n, u, v)

    a_edges = perturbed_copy(n, u, v, dist, cfg.q, rng)
    b_edges = perturbed_copy(n, u, v, dist, cfg.q, rng)
    perm = rng.permutation(n) if cfg.shuffle_b else np.arange(n)

    p = min(1.0, cfg.noise_expected_degree / n)
    noise = [
        uniform_noise_pairs(n, p, rng),
        local_noise_pairs(dist, cfg.d, cfg.local_noise_p, rng),
    ]
    generated = assemble(
        n, a_edges, b_edges, noise, perm.astype(np.int64), rng,
        name=f"grid-k{cfg.k}-s{cfg.seed}",
        metadata={"generator": "grid", **asdict(cfg)},
    )
    log.info("grid instance: %s", generated.metadata)
    return generated


class GridGenerator(Generator):
    def name(self) -> str:
        return "grid"

    def build_config(self, params: Mapping[str, Any]) -> GridGenConfig:
        fields = GridGenConfig.__dataclass_fields__
        kwargs = {key: value for key, value in params.items() if key in fields and value is not None}
        try:
            return GridGenConfig(**kwargs)
        except TypeError as exc:
            raise InvalidConfigError(str(exc)) from exc

    def generate(self, config: GridGenConfig) -> GeneratedInstance:
        return gen_grid(config)


register_generator(GridGenerator())
