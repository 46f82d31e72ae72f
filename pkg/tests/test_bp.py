# tests/test_bp.py
import numpy as np
import pytest
from hypothesis import given, settings

from conftest import instances
from core.instance import CandidateGraph, ProblemInstance, SimpleGraph
from core.matching import max_weight_matching_arrays
from core.models import BpConfig, DampingMode, StopReason
from core.objective import is_feasible
from core.oracle import brute_force_optimum
from solvers.bp import BpState, bp_step, damp, decode, greedy_selection, run_bp
from solvers.bp_oracle import oracle_max_product


def _loop_step(state: BpState, instance, alpha, beta):
    """The update written out edge by edge."""
    L, S = instance.L, instance.S
    n = L.edge_count
    half = beta / 2.0
    entries = {}
    for k in range(S.nnz):
        entries[(int(S.row_of[k]), int(S.col_of[k]))] = k

    y = np.zeros(n)
    z = np.zeros(n)
    sq = np.zeros(S.nnz)
    for e in range(n):
        i, ip = L.edge(e)
        d = 0.0
        for f in S.partners(e).tolist():
            incoming = state.sq[entries[(f, e)]]
            d += min(half, max(0.0, half + incoming))
        others_b = [state.z[g] for g in range(n) if g != e and L.ej[g] == ip]
        others_a = [state.y[g] for g in range(n) if g != e and L.ei[g] == i]
        max_b = max([0.0] + others_b)
        max_a = max([0.0] + others_a)
        y[e] = alpha * L.w[e] - max_b + d
        z[e] = alpha * L.w[e] - max_a + d
        for f in S.partners(e).tolist():
            k = entries[(e, f)]
            incoming = state.sq[entries[(f, e)]]
            sq[k] = alpha * L.w[e] - max_a - max_b + d - min(half, max(0.0, half + incoming))
    return y, z, sq


def _random_state(instance, seed):
    rng = np.random.default_rng(seed)
    n = instance.edge_count
    return BpState(t=3, y=rng.normal(size=n), z=rng.normal(size=n), sq=rng.normal(size=instance.S.nnz))


def test_step_matches_loops_on_small_example(small_example):
    state = _random_state(small_example, 7)
    new = bp_step(state, small_example, 1.0, 2.0)
    y, z, sq = _loop_step(state, small_example, 1.0, 2.0)
    np.testing.assert_allclose(new.y, y)
    np.testing.assert_allclose(new.z, z)
    np.testing.assert_allclose(new.sq, sq)
    assert new.t == 4


@settings(max_examples=60, deadline=None)
@given(instances())
def test_step_matches_loops(instance):
    state = _random_state(instance, 1)
    new = bp_step(state, instance, 0.7, 1.3)
    y, z, sq = _loop_step(state, instance, 0.7, 1.3)
    np.testing.assert_allclose(new.y, y, atol=1e-12)
    np.testing.assert_allclose(new.z, z, atol=1e-12)
    np.testing.assert_allclose(new.sq, sq, atol=1e-12)


def test_first_step_from_zero(small_example):
    state = bp_step(BpState.zeros(small_example), small_example, 1.0, 1.0)
    expected = small_example.w + 0.5 * small_example.S.row_degrees()
    np.testing.assert_allclose(state.y, expected)
    np.testing.assert_allclose(state.z, expected)


@pytest.mark.parametrize("steps", [1, 2, 3, 5])
def test_agrees_with_factor_graph_max_product(small_example, steps):
    state = BpState.zeros(small_example)
    for _ in range(steps):
        state = bp_step(state, small_example, 1.0, 1.0)
    y, z, sq = oracle_max_product(small_example, 1.0, 1.0, steps)
    np.testing.assert_allclose(state.y, y, atol=1e-9)
    np.testing.assert_allclose(state.z, z, atol=1e-9)
    np.testing.assert_allclose(state.sq, sq, atol=1e-9)


def _assert_matches_reference(instance, steps, alpha, beta):
    state = BpState.zeros(instance)
    for _ in range(steps):
        state = bp_step(state, instance, alpha, beta)
    y, z, sq = oracle_max_product(instance, alpha, beta, steps)
    np.testing.assert_allclose(state.y, y, atol=1e-9)
    np.testing.assert_allclose(state.z, z, atol=1e-9)
    np.testing.assert_allclose(state.sq, sq, atol=1e-9)


@pytest.mark.parametrize("steps", range(1, 11))
@settings(max_examples=50, deadline=None)
@given(instance=instances(max_vertices=4, max_edges=8))
def test_agrees_with_factor_graph_on_random_instances(steps, instance):
    _assert_matches_reference(instance, steps, 1.0, 2.0)


@settings(max_examples=50, deadline=None)
@given(instance=instances(max_vertices=5, max_edges=20, max_graph_edges=4))
def test_agrees_with_factor_graph_on_twenty_edges_for_ten_steps(instance):
    _assert_matches_reference(instance, 10, 0.8, 1.5)


def test_damping_modes():
    prev, new = np.array([0.0, 1.0]), np.array([1.0, 3.0])
    np.testing.assert_allclose(damp(prev, new, 2, 0.5, DampingMode.POWER), [0.25, 1.5])
    np.testing.assert_allclose(damp(prev, new, 2, 0.5, DampingMode.CONSTANT), [0.5, 2.0])
    np.testing.assert_allclose(damp(prev, new, 9, 1.0, DampingMode.POWER), new)


def test_greedy_selection_repairs_conflicts(small_example):
    n = small_example.edge_count
    L = small_example.L
    y = np.full(n, -1.0)
    # A-vertex 1 and 2 both prefer B-vertex 2 (0-based 0 and 1 prefer 1)
    y[L.edge_index(0, 1)] = 5.0
    y[L.edge_index(1, 1)] = 4.0
    y[L.edge_index(1, 0)] = 3.0
    y[L.edge_index(5, 0)] = 2.0
    state = BpState(t=1, y=y, z=np.zeros(n), sq=np.zeros(small_example.S.nnz))
    picked = greedy_selection(state, small_example).tolist()
    # vertex 4 only has a negative message and still takes it
    assert picked == sorted([L.edge_index(0, 1), L.edge_index(4, 4), L.edge_index(5, 0)])


def test_decode_yields_three_feasible_candidates(small_example):
    state = bp_step(BpState.zeros(small_example), small_example, 1.0, 1.0)
    candidates = decode(state, small_example, 1.0, 1.0)
    assert [c.source for c in candidates] == ["bp:greedy", "bp:mwm-y", "bp:mwm-z"]
    assert all(c.iteration == 1 for c in candidates)
    assert candidates[1].objective == pytest.approx(5.1)


def test_small_example_between_first_rounding_and_optimum(small_example):
    report = run_bp(small_example, BpConfig(alpha=1.0, beta=1.0, max_iters=50))
    assert 5.1 - 1e-9 <= report.best.objective <= 7.0 + 1e-9
    assert report.records[0].iteration == 1
    assert report.iterations_run == report.records[-1].iteration


def test_overlap_free_case_reduces_to_weight_matching(small_example):
    L = small_example.L
    _, value = max_weight_matching_arrays(L.ei, L.ej, L.w)
    report = run_bp(small_example, BpConfig(alpha=1.0, beta=0.0, max_iters=20))
    assert report.best.weight == pytest.approx(value)
    assert report.best.objective == pytest.approx(value)


@settings(max_examples=30, deadline=None)
@given(instances())
def test_best_never_exceeds_optimum(instance):
    report = run_bp(instance, BpConfig(alpha=1.0, beta=2.0, max_iters=15))
    opt = brute_force_optimum(instance, 1.0, 2.0)
    assert report.best.objective <= opt.objective + 1e-9


def test_final_rounding_when_cadence_skips_last_step(small_example):
    cfg = BpConfig(max_iters=7, rounding_cadence=3, stop_on_oscillation=False)
    report = run_bp(small_example, cfg)
    assert [r.iteration for r in report.records] == [3, 6, 7]
    assert report.stop_reason in (StopReason.MAX_ITERS, StopReason.CONVERGED)


def test_recovery_recorded_with_truth(small_example):
    truth = [small_example.L.edge_index(i, i) for i in range(5)]
    report = run_bp(small_example, BpConfig(max_iters=3), truth=truth)
    assert all(r.recovery is not None for r in report.records)
    assert all(0.0 <= r.recovery <= 1.0 for r in report.records)


def test_callback_sees_every_record(small_example):
    seen = []
    report = run_bp(small_example, BpConfig(max_iters=4), on_iteration=seen.append)
    assert seen == report.records


def test_identical_runs_are_identical(small_example):
    cfg = BpConfig(alpha=1.0, beta=2.0, max_iters=30)
    a = run_bp(small_example, cfg)
    b = run_bp(small_example, cfg)
    assert a.records == b.records
    assert a.best == b.best


def _two_edge_square():
    A = SimpleGraph.from_edges(2, [(0, 1)])
    B = SimpleGraph.from_edges(2, [(0, 1)])
    L = CandidateGraph.from_triplets(2, 2, [(0, 0, 0.3), (1, 1, 0.2), (0, 1, 0.6)])
    return ProblemInstance(A=A, B=B, L=L)


def test_single_edge_reference_message():
    A = SimpleGraph.from_edges(1, [])
    B = SimpleGraph.from_edges(1, [])
    L = CandidateGraph.from_triplets(1, 1, [(0, 0, 0.7)])
    y, z, sq = oracle_max_product(ProblemInstance(A=A, B=B, L=L), 2.0, 1.0, 1)
    assert y.tolist() == pytest.approx([1.4])
    assert z.tolist() == pytest.approx([1.4])
    assert sq.size == 0


@pytest.mark.parametrize("steps", [1, 2, 3])
def test_two_edge_square_matches_reference(steps):
    instance = _two_edge_square()
    assert instance.S.square_count == 1
    state = BpState.zeros(instance)
    for _ in range(steps):
        state = bp_step(state, instance, 1.0, 1.0)
    y, z, sq = oracle_max_product(instance, 1.0, 1.0, steps)
    np.testing.assert_allclose(state.y, y, atol=1e-12)
    np.testing.assert_allclose(state.z, z, atol=1e-12)
    np.testing.assert_allclose(state.sq, sq, atol=1e-12)


def test_forest_factor_graph_reaches_the_optimum():
    # one square between (0,0) and (1,1); (2,1) hangs off B-vertex 1
    A = SimpleGraph.from_edges(3, [(0, 1)])
    B = SimpleGraph.from_edges(3, [(0, 1)])
    L = CandidateGraph.from_triplets(3, 3, [(0, 0, 0.3), (1, 1, 0.2), (2, 1, 0.6)])
    instance = ProblemInstance(A=A, B=B, L=L)
    cfg = BpConfig(alpha=1.0, beta=1.0, gamma=1.0, max_iters=10, stop_on_oscillation=False)
    report = run_bp(instance, cfg)
    assert report.best.objective == pytest.approx(brute_force_optimum(instance, 1.0, 1.0).objective)


def test_decode_candidates_are_matchings(small_example):
    state = _random_state(small_example, 11)
    for candidate in decode(state, small_example, 1.0, 1.0):
        assert is_feasible(small_example, candidate.selected)


def test_greedy_takes_the_largest_message_even_when_negative():
    A = SimpleGraph.from_edges(1, [])
    B = SimpleGraph.from_edges(2, [])
    L = CandidateGraph.from_triplets(1, 2, [(0, 0, 0.2), (0, 1, 0.4)])
    instance = ProblemInstance(A=A, B=B, L=L)
    state = BpState(t=1, y=np.array([-2.0, -0.5]), z=np.zeros(2), sq=np.zeros(0))
    assert greedy_selection(state, instance).tolist() == [1]
