# generators/powerlaw.py
"""
Power-law graph pairs.

One Chung-Lu base graph with expected degrees proportional to
rank^(-1/(theta-1)), scaled to `mean_degree`; A and B are copies of it,
each perturbed independently with strength q (distances measured in the
base graph, unreachable pairs skipped). L holds the correct pairs plus
uniform noise only; there is no distance-local noise for this family.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any, Mapping, Tuple

import networkx as nx
import numpy as np

from core.errors import InvalidConfigError
from core.interfaces import Generator
from core.models import GeneratedInstance
from core.registry import register_generator

from .assembly import assemble, perturbed_copy
from .distances import hop_distances, uniform_noise_pairs

__all__ = ["PowerLawGenConfig", "expected_degrees", "chung_lu_edges", "gen_powerlaw", "PowerLawGenerator"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PowerLawGenConfig:
    n: int = 400
    theta: float = 1.8
    noise_expected_degree: float = 0.0
    q: float = 1.0
    mean_degree: float = 2.0
    seed: int = 0
    shuffle_b: bool = True

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvalidConfigError("n must be at least 2")
        if not self.theta > 1:
            raise InvalidConfigError("theta must exceed 1")
        if self.noise_expected_degree < 0 or self.q < 0:
            raise InvalidConfigError("noise and q must be nonnegative")
        if not self.mean_degree > 0:
            raise InvalidConfigError("mean_degree must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidConfigError("seed must be a 64-bit unsigned integer")


def expected_degrees(n: int, theta: float, mean_degree: float) -> np.ndarray:
    ranks = np.arange(1, n + 1, dtype=np.float64)
    raw = ranks ** (-1.0 / (theta - 1.0))
    return raw * (mean_degree * n / raw.sum())


def chung_lu_edges(n: int, theta: float, mean_degree: float, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    g = nx.expected_degree_graph(expected_degrees(n, theta, mean_degree).tolist(),
                                 seed=seed, selfloops=False)
    pairs = sorted((min(a, b), max(a, b)) for a, b in g.edges())
    if not pairs:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    arr = np.array(pairs, dtype=np.int64)
    return arr[:, 0], arr[:, 1]


def gen_powerlaw(cfg: PowerLawGenConfig) -> GeneratedInstance:
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n
    # networkx draws from Python's random module; seed it from our stream
    u, v = chung_lu_edges(n, cfg.theta, cfg.mean_degree, int(rng.integers(2 ** 32)))
    dist = hop_distances(n, u, v)

    a_edges = perturbed_copy(n, u, v, dist, cfg.q, rng)
    b_edges = perturbed_copy(n, u, v, dist, cfg.q, rng)
    perm = rng.permutation(n) if cfg.shuffle_b else np.arange(n)

    p = min(1.0, cfg.noise_expected_degree / n)
    generated = assemble(
        n, a_edges, b_edges, [uniform_noise_pairs(n, p, rng)], perm.astype(np.int64), rng,
        name=f"powerlaw-n{n}-s{cfg.seed}",
        metadata={"generator": "powerlaw", "base_edges": int(u.size), **asdict(cfg)},
    )
    log.info("power-law instance: %s", generated.metadata)
    return generated


class PowerLawGenerator(Generator):
    def name(self) -> str:
        return "powerlaw"

    def build_config(self, params: Mapping[str, Any]) -> PowerLawGenConfig:
        fields = PowerLawGenConfig.__dataclass_fields__
        kwargs = {key: value for key, value in params.items() if key in fields and value is not None}
        try:
            return PowerLawGenConfig(**kwargs)
        except TypeError as exc:
            raise InvalidConfigError(str(exc)) from exc

    def generate(self, config: PowerLawGenConfig) -> GeneratedInstance:
        return gen_powerlaw(config)


register_generator(PowerLawGenerator())
