# tests/test_config.py
import logging

import pytest

from core.errors import InvalidConfigError
from core.models import BpConfig, DampingMode, IsoRankConfig, MrConfig, SolverConfig, StepSchedule
from infra.config_loader import load_config, split_list
from infra.logging_config import configure_logging
from solvers.settings import bp_config, exhaustive_config, isorank_config, mr_config


def test_defaults(monkeypatch):
    for key in ("NETALIGN_THREADS", "NETALIGN_BP_ITERS", "NETALIGN_LOG_LEVEL", "NETALIGN_TOLERANCE"):
        monkeypatch.delenv(key, raising=False)
    cfg = load_config()
    assert cfg["threads"] == 1
    assert (cfg["bp_iters"], cfg["mr_iters"], cfg["isorank_iters"]) == (100, 1000, 100)
    assert cfg["oracle_cap"] == 20
    assert cfg["log_level"] == "INFO"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("NETALIGN_THREADS", "4")
    monkeypatch.setenv("NETALIGN_BP_ITERS", "25")
    monkeypatch.setenv("NETALIGN_TOLERANCE", "1e-6")
    monkeypatch.setenv("NETALIGN_LOG_LEVEL", "debug")
    monkeypatch.setenv("NETALIGN_LOG_TO_FILE", "no")
    cfg = load_config()
    assert cfg["threads"] == 4
    assert cfg["bp_iters"] == 25
    assert cfg["tolerance"] == 1e-6
    assert cfg["log_level"] == "DEBUG"
    assert cfg["log_to_file"] is False


def test_malformed_values_keep_defaults(monkeypatch):
    monkeypatch.setenv("NETALIGN_THREADS", "many")
    monkeypatch.setenv("NETALIGN_TOLERANCE", "-1")
    cfg = load_config()
    assert cfg["threads"] == 1
    assert cfg["tolerance"] == 1e-8


def test_threads_never_below_one(monkeypatch):
    monkeypatch.setenv("NETALIGN_THREADS", "0")
    assert load_config()["threads"] == 1


def test_split_list():
    assert split_list("0.9, 0.99,,0.999 ") == ["0.9", "0.99", "0.999"]


def test_logging_is_configured_once(tmp_path):
    configure_logging("WARNING", log_dir=tmp_path, log_to_file=False)
    before = len(logging.getLogger().handlers)
    configure_logging("DEBUG", log_dir=tmp_path, log_to_file=False)
    assert len(logging.getLogger().handlers) == before
    assert logging.getLogger().level == logging.DEBUG
    configure_logging("INFO", log_dir=tmp_path, log_to_file=False)


# ---------- solver configs ----------

@pytest.mark.parametrize(
    "kwargs",
    [
        {"alpha": 0.0, "beta": 0.0},
        {"alpha": -1.0},
        {"gamma": 1.5},
        {"max_iters": 0},
        {"tolerance": 0.0},
    ],
)
def test_shared_validation(kwargs):
    with pytest.raises(InvalidConfigError):
        SolverConfig(**kwargs)


def test_solver_specific_validation():
    with pytest.raises(InvalidConfigError):
        BpConfig(oscillation_window=1)
    with pytest.raises(InvalidConfigError):
        IsoRankConfig(gamma=1.0)
    with pytest.raises(InvalidConfigError):
        MrConfig(threads=0)


def test_overlap_only_preset():
    cfg = SolverConfig.overlap_only(max_iters=5)
    assert (cfg.alpha, cfg.beta, cfg.max_iters) == (0.0, 1.0, 5)


def test_bp_params_from_flags():
    cfg = bp_config({"alpha": "1", "beta": 2, "gamma": "0.99", "damping": "constant", "window": "4"},
                    {"bp_iters": 100, "tolerance": 1e-8})
    assert cfg.beta == 2.0 and cfg.gamma == 0.99
    assert cfg.damping_mode is DampingMode.CONSTANT
    assert cfg.oscillation_window == 4
    assert cfg.max_iters == 100


def test_mr_params_use_app_defaults():
    cfg = mr_config({"mr_step_schedule": "halving"}, {"mr_iters": 1000, "threads": 3, "tolerance": 1e-8})
    assert cfg.step_schedule is StepSchedule.HALVING
    assert cfg.threads == 3
    assert cfg.max_iters == 1000
    assert cfg.gamma == 0.4


def test_isorank_keeps_its_own_tolerance():
    cfg = isorank_config({}, {"isorank_iters": 100, "tolerance": 1e-8})
    assert cfg.tolerance == 1e-12
    assert isorank_config({"tol": 1e-6}, {}).tolerance == 1e-6


def test_exhaustive_cap_from_defaults():
    assert exhaustive_config({}, {"oracle_cap": 7}).cap == 7


@pytest.mark.parametrize(
    "params",
    [{"damping": "wild"}, {"iters": "ten"}, {"iters": 2.5}, {"gamma": "x"}],
)
def test_bad_params_raise_config_errors(params):
    with pytest.raises(InvalidConfigError):
        bp_config(params, {})


def test_oscillation_and_stall_windows_are_separate_settings():
    defaults = {"bp_iters": 100, "mr_iters": 1000, "threads": 1, "tolerance": 1e-8}
    params = {"window": "4", "stall_window": "25"}
    assert bp_config(params, defaults).oscillation_window == 4
    mr = mr_config(params, defaults)
    assert mr.stall_window == 25
    assert mr_config({"window": "4"}, defaults).stall_window == MrConfig.stall_window
