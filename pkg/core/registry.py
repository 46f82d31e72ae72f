# core/registry.py
"""
Lightweight plugin registry for solvers and generators.

Usage pattern:
- Each concrete solver/generator module creates an instance and calls
  register_solver(...) / register_generator(...) at import time.
- The orchestrator looks plugins up by name; it never imports a concrete
  module's classes.
"""

from __future__ import annotations

from typing import List

from .errors import InvalidConfigError
from .interfaces import Generator, Solver

_SOLVERS: List[Solver] = []
_GENERATORS: List[Generator] = []


def register_solver(s: Solver) -> None:
    """Register a solver instance once per concrete class."""
    if not any(isinstance(existing, type(s)) for existing in _SOLVERS):
        _SOLVERS.append(s)


def register_generator(g: Generator) -> None:
    if not any(isinstance(existing, type(g)) for existing in _GENERATORS):
        _GENERATORS.append(g)


def solvers() -> List[Solver]:
    """Shallow copy, so callers cannot mutate the store."""
    return list(_SOLVERS)


def generators() -> List[Generator]:
    return list(_GENERATORS)


def get_solver(name: str) -> Solver:
    for s in _SOLVERS:
        if s.name() == name:
            return s
    known = ", ".join(sorted(s.name() for s in _SOLVERS)) or "none registered"
    raise InvalidConfigError(f"unknown solver {name!r} (known: {known})")


def get_generator(name: str) -> Generator:
    for g in _GENERATORS:
        if g.name() == name:
            return g
    known = ", ".join(sorted(g.name() for g in _GENERATORS)) or "none registered"
    raise InvalidConfigError(f"unknown generator {name!r} (known: {known})")


def clear_registry() -> None:
    """
    Testing helper: wipe current registrations.
    Not intended for use in the running app.
    """
    _SOLVERS.clear()
    _GENERATORS.clear()
