# tests/test_registry.py
import pytest

from core.errors import InvalidConfigError, OracleScaleError
from core.models import ExhaustiveConfig, StopReason
from core.registry import generators, get_generator, get_solver, register_solver, solvers
from solvers.bp import BpSolver
from solvers.exhaustive import ExhaustiveSolver


def test_all_plugins_registered():
    assert {s.name() for s in solvers()} >= {"bp", "mr", "isorank", "exhaustive"}
    assert {g.name() for g in generators()} >= {"grid", "powerlaw"}


def test_registration_is_unique_per_class():
    before = len(solvers())
    register_solver(BpSolver())
    assert len(solvers()) == before


def test_unknown_names_list_the_known_ones():
    with pytest.raises(InvalidConfigError, match="bp"):
        get_solver("simplex")
    with pytest.raises(InvalidConfigError, match="grid"):
        get_generator("lattice")


def test_exhaustive_solver_reports_the_optimum(small_example):
    solver = get_solver("exhaustive")
    report = solver.solve(small_example, ExhaustiveConfig())
    assert report.best.objective == pytest.approx(7.0)
    assert report.best_upper == pytest.approx(7.0)
    assert report.stop_reason is StopReason.CONVERGED
    assert len(report.records) == 1


def test_exhaustive_solver_respects_cap(small_example):
    with pytest.raises(OracleScaleError):
        ExhaustiveSolver().solve(small_example, ExhaustiveConfig(cap=3))
