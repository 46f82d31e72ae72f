# infra/logging_config.py
"""
Centralized logging setup: console plus an optional rotating file handler.
"""

from __future__ import annotations

import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(
    level_name: str = "INFO",
    log_dir: Optional[Path] = None,
    log_to_file: bool = True,
) -> None:
    """
    Configure console + rotating file logging on the root logger.

    Args:
        level_name: "DEBUG" | "INFO" | "WARNING" | "ERROR"
        log_dir: log directory (defaults to ./logs); ignored without log_to_file
        log_to_file: attach the 5 MB x 3 rotating file handler
    """
    level = getattr(logging, str(level_name).upper(), logging.INFO)
    fmt = logging.Formatter(_FORMAT)

    root = logging.getLogger()
    # Repeated calls (tests, several CLI invocations in one process) only
    # update levels.
    if root.handlers:
        root.setLevel(level)
        for h in root.handlers:
            h.setLevel(level)
        return

    root.setLevel(level)

    console = logging.StreamHandler()
    console.setLevel(level)
    console.setFormatter(fmt)
    root.addHandler(console)

    if log_to_file:
        log_dir = Path(log_dir) if log_dir else (Path.cwd() / "logs")
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_dir / "netalign.log", maxBytes=5_000_000, backupCount=3, encoding="utf-8"
        )
        file_handler.setLevel(level)
        file_handler.setFormatter(fmt)
        root.addHandler(file_handler)
