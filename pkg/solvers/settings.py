# solvers/settings.py
"""
Turn raw run parameters (CLI flags, sweep cells) into validated solver configs.

Params use the command-line vocabulary:
    alpha, beta, gamma, iters, tol, seed, damping, mr_step_schedule,
    cadence, window (BP oscillation), stall_window (MR halving), threads
A value of None means "not given": the dataclass default applies, except
for the iteration budget, tolerance and thread count, which come from the
loaded app config (`defaults`, see infra.config_loader).

Everything here raises InvalidConfigError, never TypeError/ValueError, so
the orchestrator can report bad input uniformly.
"""

from __future__ import annotations

from enum import Enum
from typing import Any, Dict, Mapping, Type, TypeVar

from core.errors import InvalidConfigError
from core.models import (
    BpConfig,
    DampingMode,
    ExhaustiveConfig,
    IsoRankConfig,
    MrConfig,
    StepSchedule,
)

__all__ = ["bp_config", "mr_config", "isorank_config", "exhaustive_config"]

E = TypeVar("E", bound=Enum)


def _number(params: Mapping[str, Any], key: str, kind: type) -> Any:
    value = params.get(key)
    if value is None:
        return None
    try:
        out = kind(value)
    except (TypeError, ValueError) as exc:
        raise InvalidConfigError(f"{key}: expected {kind.__name__}, got {value!r}") from exc
    if kind is int and isinstance(value, float) and value != out:
        raise InvalidConfigError(f"{key}: expected an integer, got {value!r}")
    return out


def _enum(params: Mapping[str, Any], key: str, enum_type: Type[E]) -> Any:
    value = params.get(key)
    if value is None or isinstance(value, enum_type):
        return value
    try:
        return enum_type(str(value).lower())
    except ValueError as exc:
        allowed = ", ".join(m.value for m in enum_type)
        raise InvalidConfigError(f"{key}: {value!r} is not one of {allowed}") from exc


def _common(params: Mapping[str, Any], defaults: Mapping[str, Any], iters_key: str) -> Dict[str, Any]:
    kwargs: Dict[str, Any] = {
        "alpha": _number(params, "alpha", float),
        "beta": _number(params, "beta", float),
        "gamma": _number(params, "gamma", float),
        "max_iters": _number(params, "iters", int),
        "tolerance": _number(params, "tol", float),
        "seed": _number(params, "seed", int),
    }
    if kwargs["max_iters"] is None and iters_key in defaults:
        kwargs["max_iters"] = int(defaults[iters_key])
    return kwargs


def _build(cls: type, kwargs: Dict[str, Any]) -> Any:
    return cls(**{k: v for k, v in kwargs.items() if v is not None})


def bp_config(params: Mapping[str, Any], defaults: Mapping[str, Any]) -> BpConfig:
    kwargs = _common(params, defaults, "bp_iters")
    if kwargs["tolerance"] is None and "tolerance" in defaults:
        kwargs["tolerance"] = float(defaults["tolerance"])
    kwargs["damping_mode"] = _enum(params, "damping", DampingMode)
    kwargs["rounding_cadence"] = _number(params, "cadence", int)
    kwargs["oscillation_window"] = _number(params, "window", int)
    return _build(BpConfig, kwargs)


def mr_config(params: Mapping[str, Any], defaults: Mapping[str, Any]) -> MrConfig:
    kwargs = _common(params, defaults, "mr_iters")
    if kwargs["tolerance"] is None and "tolerance" in defaults:
        kwargs["tolerance"] = float(defaults["tolerance"])
    kwargs["step_schedule"] = _enum(params, "mr_step_schedule", StepSchedule)
    kwargs["stall_window"] = _number(params, "stall_window", int)
    threads = _number(params, "threads", int)
    if threads is None:
        threads = int(defaults.get("threads", 1))
    kwargs["threads"] = threads
    return _build(MrConfig, kwargs)


def exhaustive_config(params: Mapping[str, Any], defaults: Mapping[str, Any]) -> ExhaustiveConfig:
    kwargs = _common(params, defaults, "")
    kwargs["max_iters"] = None
    kwargs["cap"] = int(defaults["oracle_cap"]) if "oracle_cap" in defaults else None
    return _build(ExhaustiveConfig, kwargs)


def isorank_config(params: Mapping[str, Any], defaults: Mapping[str, Any]) -> IsoRankConfig:
    # SpaIsoRank keeps its own tighter tolerance unless --tol is given
    kwargs = _common(params, defaults, "isorank_iters")
    kwargs["rounding_cadence"] = _number(params, "cadence", int)
    return _build(IsoRankConfig, kwargs)
