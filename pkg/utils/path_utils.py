# utils/path_utils.py
"""
Path utilities: atomic output writing and instance bundle discovery.

- Outputs are written to a temporary sibling and moved into place, so a run
  that fails half way never leaves a partial file behind.
- Bundle discovery walks a folder, pruning ignored directories, and yields
  every directory holding a manifest.
"""

from __future__ import annotations

import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Set

MANIFEST_NAME = "manifest.json"

_DEFAULT_IGNORES: Set[str] = {".git", "__pycache__", "venv", "logs"}


@contextmanager
def atomic_writer(path: Path | str, newline: Optional[str] = None) -> Iterator[IO[str]]:
    """
    Open a text handle whose content replaces `path` only if the block exits
    cleanly. Parent directories are created on demand.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline=newline) as fp:
            yield fp
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def atomic_write_text(path: Path | str, text: str) -> None:
    with atomic_writer(path, newline="") as fp:
        fp.write(text)


def iter_bundle_dirs(
    root: Path | str,
    ignore_dirs: Optional[Iterable[str]] = None,
) -> Iterator[Path]:
    """
    Yield directories under `root` (root included) that contain a manifest,
    in sorted order. Does not follow symlinks.
    """
    root_path = Path(root).resolve()
    ignored = _normalize_names(ignore_dirs or _DEFAULT_IGNORES)
    found = []
    for dirpath, dirnames, filenames in os.walk(root_path, topdown=True, followlinks=False):
        dirnames[:] = sorted(d for d in dirnames if d.lower() not in ignored)
        if MANIFEST_NAME in filenames:
            found.append(Path(dirpath))
    yield from sorted(found)


def _normalize_names(names: Iterable[str]) -> Set[str]:
    return {str(n).lower() for n in names if str(n).strip()}
