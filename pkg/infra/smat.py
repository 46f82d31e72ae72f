# infra/smat.py
"""
Sparse triplet text files ("smat").

    rows cols nnz
    row col value        (nnz lines, zero-based indices)

Values are written with 17 significant digits so doubles survive a round
trip, and triplets are written sorted by (row, col).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from core.errors import SmatParseError
from utils.path_utils import atomic_writer

__all__ = ["SmatMatrix", "read_smat", "write_smat"]


@dataclass(frozen=True, eq=False)
class SmatMatrix:
    rows: int
    cols: int
    row: np.ndarray
    col: np.ndarray
    val: np.ndarray

    @property
    def nnz(self) -> int:
        return int(self.row.size)

    @classmethod
    def from_scipy(cls, matrix: sp.spmatrix) -> "SmatMatrix":
        coo = sp.coo_matrix(matrix)
        return cls(coo.shape[0], coo.shape[1], coo.row.astype(np.int64),
                   coo.col.astype(np.int64), coo.data.astype(np.float64))

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.val, (self.row, self.col)), shape=(self.rows, self.cols))

    def sorted(self) -> "SmatMatrix":
        order = np.lexsort((self.col, self.row))
        return SmatMatrix(self.rows, self.cols, self.row[order], self.col[order], self.val[order])


def _parse_int(token: str, path: Path, line_no: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise SmatParseError(path, line_no, f"{what} is not an integer: {token!r}") from None


def read_smat(path: Path | str) -> SmatMatrix:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fp:
        lines = fp.read().splitlines()

    if not lines or not lines[0].strip():
        raise SmatParseError(path, 1, "missing header 'rows cols nnz'")
    header = lines[0].split()
    if len(header) != 3:
        raise SmatParseError(path, 1, f"header needs 3 fields, found {len(header)}")
    rows, cols, nnz = (_parse_int(t, path, 1, name) for t, name in zip(header, ("rows", "cols", "nnz")))
    if rows < 0 or cols < 0 or nnz < 0:
        raise SmatParseError(path, 1, "header values must be nonnegative")

    row = np.empty(nnz, dtype=np.int64)
    col = np.empty(nnz, dtype=np.int64)
    val = np.empty(nnz, dtype=np.float64)
    count = 0
    for line_no, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        if count == nnz:
            raise SmatParseError(path, line_no, f"more than the declared {nnz} triplets")
        if len(parts) != 3:
            raise SmatParseError(path, line_no, f"expected 'row col value', found {len(parts)} fields")
        r = _parse_int(parts[0], path, line_no, "row")
        c = _parse_int(parts[1], path, line_no, "col")
        if not (0 <= r < rows and 0 <= c < cols):
            raise SmatParseError(path, line_no, f"index ({r}, {c}) outside {rows}x{cols}")
        try:
            v = float(parts[2])
        except ValueError:
            raise SmatParseError(path, line_no, f"value is not a number: {parts[2]!r}") from None
        row[count], col[count], val[count] = r, c, v
        count += 1

    if count != nnz:
        raise SmatParseError(path, len(lines), f"header declares {nnz} triplets, found {count}")
    return SmatMatrix(rows, cols, row, col, val)


def write_smat(matrix: SmatMatrix, path: Path | str) -> None:
    m = matrix.sorted()
    with atomic_writer(path, newline="\n") as fp:
        fp.write(f"{m.rows} {m.cols} {m.nnz}\n")
        for r, c, v in zip(m.row.tolist(), m.col.tolist(), m.val.tolist()):
            fp.write(f"{r} {c} {v:.17g}\n")
