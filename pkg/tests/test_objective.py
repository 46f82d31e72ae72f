# tests/test_objective.py
import pytest

from conftest import selection
from core.errors import FeasibilityError, UndefinedMetricError
from core.models import AlignmentSolution, SolveReport
from core.objective import (
    count_overlaps,
    is_feasible,
    make_solution,
    matching_violations,
    objective,
    objective_ratio,
    recovery_fraction,
)

DIAGONAL = [(1, 1), (2, 2), (3, 3), (4, 4), (5, 5)]
OPTIMUM = [(2, 2), (6, 1), (3, 3), (4, 4), (5, 5)]


def test_diagonal_matching_scores(small_example):
    sel = selection(small_example, DIAGONAL)
    sol = make_solution(small_example, sel, 1.0, 1.0)
    assert sol.weight == pytest.approx(2.6)
    assert sol.overlaps == 4
    assert sol.objective == pytest.approx(6.6)
    assert objective(small_example, sel, 1.0, 1.0) == pytest.approx(6.6)


def test_objective_for_reweights(small_example):
    sol = make_solution(small_example, selection(small_example, DIAGONAL), 1.0, 1.0)
    assert sol.objective_for(0.0, 1.0) == 4
    assert sol.objective_for(2.0, 0.5) == pytest.approx(7.2)


def test_empty_selection_scores_zero(small_example):
    sol = make_solution(small_example, [], 1.0, 1.0)
    assert sol.objective == 0
    assert len(sol) == 0
    assert count_overlaps(small_example, []) == 0


def test_violations_list_shared_vertices(small_example):
    sel = selection(small_example, [(2, 2), (2, 1), (1, 1)])
    v = matching_violations(small_example, sel)
    assert v == {"A": [1], "B": [0]}
    assert not is_feasible(small_example, sel)
    with pytest.raises(FeasibilityError) as info:
        make_solution(small_example, sel, 1.0, 1.0)
    assert info.value.violations == v


def test_out_of_range_selection_is_infeasible(small_example):
    with pytest.raises(FeasibilityError):
        matching_violations(small_example, [99])


def test_recovery_fraction():
    assert recovery_fraction([0, 2, 5], [0, 1, 2, 3]) == 0.5
    assert recovery_fraction([], [1]) == 0.0
    with pytest.raises(UndefinedMetricError):
        recovery_fraction([1], [])


def test_objective_ratio_against_truth(small_example):
    truth = selection(small_example, DIAGONAL)
    better = selection(small_example, OPTIMUM)
    assert objective_ratio(small_example, truth, truth, 1.0, 1.0) == 1.0
    assert objective_ratio(small_example, better, truth, 1.0, 1.0) == pytest.approx(7.0 / 6.6)


def test_objective_ratio_undefined_on_zero_truth(small_example):
    with pytest.raises(UndefinedMetricError):
        objective_ratio(small_example, [], [], 1.0, 1.0)


def test_report_keeps_first_of_equal_candidates():
    report = SolveReport(solver="x")
    first = AlignmentSolution((0,), 1.0, 0, 1.0, 1.0, source="a")
    tie = AlignmentSolution((1,), 1.0, 0, 1.0, 1.0, source="b")
    assert report.offer(first)
    assert not report.offer(tie)
    assert report.best.source == "a"
    report.offer_upper(3.0)
    report.offer_upper(4.0)
    assert report.best_upper == 3.0
    assert report.gap == 2.0
