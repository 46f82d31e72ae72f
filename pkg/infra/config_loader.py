# infra/config_loader.py
"""
Central configuration loader for the toolkit.

Responsibilities:
- Provide a single place to define default configuration values.
- Allow simple environment variable overrides for quick tweaks (no code changes).

Environment variables:
- NETALIGN_LOG_LEVEL        (DEBUG/INFO/WARNING/ERROR)
- NETALIGN_LOG_DIR          (directory for the rotating log file)
- NETALIGN_LOG_TO_FILE      ("1"/"true"/"yes" -> True)
- NETALIGN_THREADS          (int; caps sweep and row-matching parallelism)
- NETALIGN_ORACLE_CAP       (int; largest |E_L| the exhaustive search accepts)
- NETALIGN_BP_ITERS         (int; default iteration budget for BP)
- NETALIGN_MR_ITERS         (int; default iteration budget for MR)
- NETALIGN_ISORANK_ITERS    (int; default iteration budget for SpaIsoRank)
- NETALIGN_TOLERANCE        (float; default convergence tolerance)
"""

from __future__ import annotations

import os
from typing import Any, Dict, List


_DEFAULT: Dict[str, Any] = {
    "log_level": "INFO",
    "log_dir": "logs",
    "log_to_file": True,

    "threads": 1,
    "oracle_cap": 20,

    # iteration budgets of the synthetic experiments
    "bp_iters": 100,
    "mr_iters": 1000,
    "isorank_iters": 100,
    "tolerance": 1e-8,
}


def load_config() -> Dict[str, Any]:
    """
    Return a config dict. Environment variables override the defaults;
    malformed numeric values are ignored and the default kept.
    """
    cfg = dict(_DEFAULT)

    _int_env(cfg, "threads", "NETALIGN_THREADS")
    _int_env(cfg, "oracle_cap", "NETALIGN_ORACLE_CAP")
    _int_env(cfg, "bp_iters", "NETALIGN_BP_ITERS")
    _int_env(cfg, "mr_iters", "NETALIGN_MR_ITERS")
    _int_env(cfg, "isorank_iters", "NETALIGN_ISORANK_ITERS")
    _float_env(cfg, "tolerance", "NETALIGN_TOLERANCE")

    _bool_env(cfg, "log_to_file", "NETALIGN_LOG_TO_FILE")

    _str_upper_env(cfg, "log_level", "NETALIGN_LOG_LEVEL")
    _str_env(cfg, "log_dir", "NETALIGN_LOG_DIR")

    cfg["threads"] = max(1, cfg["threads"])
    return cfg


# ----------------- helpers -----------------

def split_list(s: str) -> List[str]:
    return [part.strip() for part in s.split(",") if part.strip()]


def _bool_env(cfg: Dict[str, Any], key: str, env_key: str) -> None:
    val = os.getenv(env_key)
    if val is None:
        return
    s = val.strip().lower()
    cfg[key] = s in {"1", "true", "yes", "on"}


def _int_env(cfg: Dict[str, Any], key: str, env_key: str) -> None:
    val = os.getenv(env_key)
    if val and val.strip().isdigit():
        cfg[key] = int(val)


def _float_env(cfg: Dict[str, Any], key: str, env_key: str) -> None:
    val = os.getenv(env_key)
    if not val:
        return
    try:
        parsed = float(val)
    except ValueError:
        return
    if parsed > 0:
        cfg[key] = parsed


def _str_env(cfg: Dict[str, Any], key: str, env_key: str) -> None:
    val = os.getenv(env_key)
    if val is not None:
        cfg[key] = val.strip()


def _str_upper_env(cfg: Dict[str, Any], key: str, env_key: str) -> None:
    val = os.getenv(env_key)
    if val is not None:
        cfg[key] = val.strip().upper()
