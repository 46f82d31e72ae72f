# tests/test_acceptance.py
"""
Experiment-scale checks on synthetic families (run with `pytest -m slow`).
"""

from functools import lru_cache

import numpy as np
import pytest

from core.instance import CandidateGraph, ProblemInstance, SimpleGraph
from core.matching import max_weight_matching_arrays
from core.models import BpConfig, DampingMode, IsoRankConfig, MrConfig
from core.objective import objective, objective_ratio, recovery_fraction
from core.oracle import brute_force_optimum, optimal_selections
from generators.grid import GridGenConfig, gen_grid, grid_edges
from generators.powerlaw import PowerLawGenConfig, chung_lu_edges, gen_powerlaw
from solvers.bp import run_bp
from solvers.isorank import run_spaisorank
from solvers.mr import run_mr

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def low_noise_grid():
    return gen_grid(GridGenConfig(k=20, noise_expected_degree=1.0, seed=17))


def test_bp_recovers_low_noise_grid(low_noise_grid):
    g = low_noise_grid
    report = run_bp(g.instance, BpConfig(alpha=1.0, beta=2.0, gamma=0.999, max_iters=100), truth=g.truth)
    assert recovery_fraction(report.best.selected, g.truth) >= 0.9


def test_mr_bounds_low_noise_grid(low_noise_grid):
    g = low_noise_grid
    report = run_mr(g.instance, MrConfig(alpha=1.0, beta=2.0, max_iters=200), truth=g.truth)
    truth_value = objective(g.instance, g.truth, 1.0, 2.0)
    assert report.best_upper >= report.best.objective
    assert report.best.objective >= 0.9 * truth_value


def test_isorank_stays_below_the_relaxation_bound(low_noise_grid):
    g = low_noise_grid
    iso = run_spaisorank(g.instance, IsoRankConfig(alpha=1.0, beta=2.0, max_iters=100))
    mr = run_mr(g.instance, MrConfig(alpha=1.0, beta=2.0, max_iters=50))
    assert iso.best.objective <= mr.best_upper + 1e-9


def test_powerlaw_without_noise_is_recovered():
    g = gen_powerlaw(PowerLawGenConfig(n=200, q=0.0, seed=5))
    report = run_bp(g.instance, BpConfig(alpha=1.0, beta=1.0, max_iters=100), truth=g.truth)
    assert recovery_fraction(report.best.selected, g.truth) == pytest.approx(1.0)


def test_bp_matches_or_beats_isorank_on_most_grids():
    wins = 0
    for seed in range(10):
        g = gen_grid(GridGenConfig(k=10, noise_expected_degree=2.0, seed=seed))
        bp = run_bp(g.instance, BpConfig(alpha=1.0, beta=2.0, max_iters=100))
        iso = run_spaisorank(g.instance, IsoRankConfig(alpha=1.0, beta=2.0, max_iters=100))
        wins += bp.best.objective >= iso.best.objective - 1e-9
    assert wins >= 9


def test_powerlaw_degree_tail_follows_theta():
    theta = 1.8
    degrees = []
    for seed in range(20):
        u, v = chung_lu_edges(2000, theta, 2.0, seed)
        degrees.append(np.bincount(np.concatenate([u, v]), minlength=2000))
    degrees = np.concatenate(degrees)
    edges = np.unique(np.round(np.geomspace(3, degrees.max() + 1, 12)))
    counts, _ = np.histogram(degrees, bins=edges)
    widths = np.diff(edges)
    mids = np.sqrt(edges[:-1] * edges[1:])
    keep = counts > 0
    slope = np.polyfit(np.log(mids[keep]), np.log(counts[keep] / widths[keep]), 1)[0]
    assert abs(-slope - theta) <= 0.3


# ---------- oracle suite: small grid and Chung-Lu fragments ----------

def _fragment(seed: int) -> ProblemInstance:
    """A permuted copy of a small grid or Chung-Lu graph with at most 12 candidate edges."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 7))
    if seed % 2 == 0:
        _, u, v = grid_edges(3)
        keep = (u < n) & (v < n)
        u, v = u[keep], v[keep]
    else:
        u, v = chung_lu_edges(n, 2.5, 2.0, seed)
    perm = rng.permutation(n)
    A = SimpleGraph.from_edges(n, zip(u.tolist(), v.tolist()))
    B = SimpleGraph.from_edges(n, zip(perm[u].tolist(), perm[v].tolist()))

    truth = [(a, int(perm[a])) for a in range(n)]
    others = [(a, b) for a in range(n) for b in range(n) if b != perm[a]]
    picks = rng.choice(len(others), size=12 - n, replace=False)
    pairs = truth + [others[k] for k in sorted(picks)]
    weights = rng.uniform(0.0, 1.0, size=len(pairs))
    L = CandidateGraph.from_triplets(n, n, [(a, b, float(x)) for (a, b), x in zip(pairs, weights)])
    return ProblemInstance(A=A, B=B, L=L, name=f"fragment-{seed}")


@pytest.fixture(scope="module")
def oracle_suite():
    suite = []
    for seed in range(200):
        alpha = (0.0, 1.0)[seed % 2]
        beta = (1.0, 2.0)[(seed // 2) % 2]
        instance = _fragment(seed)
        opt = brute_force_optimum(instance, alpha, beta).objective
        suite.append((instance, alpha, beta, opt))
    return suite


def _slack(value: float) -> float:
    return 1e-9 * max(1.0, abs(value))


def test_solvers_respect_the_exhaustive_optimum(oracle_suite):
    for instance, alpha, beta, opt in oracle_suite:
        bp = run_bp(instance, BpConfig(alpha=alpha, beta=beta, max_iters=100))
        mr = run_mr(instance, MrConfig(alpha=alpha, beta=beta, max_iters=200))
        assert bp.best.objective <= opt + _slack(opt), instance.name
        assert mr.best.objective <= opt + _slack(opt), instance.name
        assert mr.best_upper >= opt - _slack(opt), instance.name


def test_damped_bp_reaches_the_optimum_on_most_fragments(oracle_suite):
    cfg = dict(gamma=0.999, damping_mode=DampingMode.POWER, max_iters=200)
    hits = 0
    for instance, alpha, beta, opt in oracle_suite:
        bp = run_bp(instance, BpConfig(alpha=alpha, beta=beta, **cfg))
        hits += bp.best.objective >= opt - _slack(opt)
    assert hits >= 0.8 * len(oracle_suite)


def test_weight_only_solvers_find_a_unique_matching_optimum():
    checked = 0
    for seed in range(1000, 1050):
        instance = _fragment(seed)
        _, winners = optimal_selections(instance, 1.0, 0.0)
        if len(winners) != 1:
            continue
        L = instance.L
        _, value = max_weight_matching_arrays(L.ei, L.ej, L.w)
        bp = run_bp(instance, BpConfig(alpha=1.0, beta=0.0, max_iters=100))
        mr = run_mr(instance, MrConfig(alpha=1.0, beta=0.0, max_iters=50))
        assert bp.best.objective == pytest.approx(value, abs=1e-9), instance.name
        assert mr.best.objective == pytest.approx(value, abs=1e-9), instance.name
        checked += 1
    assert checked >= 40


# ---------- grid noise sweep ----------

@lru_cache(maxsize=None)
def _grid_means(noise: float):
    """Mean (recovery, objective ratio) of BP and MR over seeds 0-9 of the k=20 grid."""
    alpha, beta = 1.0, 2.0
    scores = {"bp": [], "mr": []}
    for seed in range(10):
        g = gen_grid(GridGenConfig(k=20, q=2.0, d=1, noise_expected_degree=noise, seed=seed))
        reports = {
            "bp": run_bp(g.instance, BpConfig(alpha=alpha, beta=beta, max_iters=100)),
            "mr": run_mr(g.instance, MrConfig(alpha=alpha, beta=beta, max_iters=200)),
        }
        for name, report in reports.items():
            selected = report.best.selected
            scores[name].append((
                recovery_fraction(selected, g.truth),
                objective_ratio(g.instance, selected, g.truth, alpha, beta),
            ))
    return {name: tuple(np.mean(values, axis=0)) for name, values in scores.items()}


@pytest.mark.parametrize("noise", [2.0, 6.0])
def test_low_noise_grids_are_recovered(noise):
    means = _grid_means(noise)
    for name in ("bp", "mr"):
        recovery, ratio = means[name]
        assert recovery >= 0.85, name
        assert ratio >= 0.9, name


@pytest.mark.parametrize("noise", [12.0])
def test_bp_keeps_up_with_mr_under_heavy_noise(noise):
    means = _grid_means(noise)
    assert means["bp"][1] >= means["mr"][1] - 0.05


def test_every_mr_upper_bound_covers_all_solvers_on_grids():
    alpha, beta = 1.0, 2.0
    for seed in range(20):
        noise = (2.0, 6.0, 12.0, 20.0)[seed % 4]
        g = gen_grid(GridGenConfig(k=20, noise_expected_degree=noise, seed=seed))
        bp = run_bp(g.instance, BpConfig(alpha=alpha, beta=beta, max_iters=100))
        iso = run_spaisorank(g.instance, IsoRankConfig(alpha=alpha, beta=beta, max_iters=100))
        mr = run_mr(g.instance, MrConfig(alpha=alpha, beta=beta, max_iters=100))
        best = max(bp.best.objective, iso.best.objective, mr.best.objective)
        uppers = [r.upper_bound for r in mr.records if r.upper_bound is not None]
        assert uppers
        assert min(uppers) >= best - _slack(best), f"seed {seed}"
