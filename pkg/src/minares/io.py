"""Matrix Market input/output and CSV convergence histories.

Only the coordinate format with a ``real`` or ``integer`` field is read.
Symmetric files are taken as they are; ``general`` files must be square and
symmetric to within ``1e-14 * max|a_ij|``.  Every parse error reports the
offending line number.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, MatrixMarketError
from .operator import SparseSymmetric
from .report import SolveReport

__all__ = [
    "HistoryRecord",
    "read_matrix_market",
    "read_rectangular",
    "write_matrix_market",
    "read_vector",
    "write_history",
    "read_history",
    "records_from_report",
    "HISTORY_HEADER",
]

HISTORY_HEADER = ("k", "rnorm_est", "arnorm_est", "rnorm", "arnorm", "seconds")

_FIELDS = {"real", "integer", "pattern", "complex"}
_SYMMETRIES = {"general", "symmetric", "skew-symmetric", "hermitian"}


def _parse(path):
    """Return ``(shape, symmetry, rows, cols, vals)`` with 1-based indices."""
    with open(path, "r", encoding="ascii", errors="replace") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixMarketError(1, "empty file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "%%MatrixMarket":
        raise MatrixMarketError(1, "missing '%%MatrixMarket' banner")
    obj, fmt, field, symmetry = (t.lower() for t in head[1:])
    if obj != "matrix":
        raise MatrixMarketError(1, f"unsupported object '{obj}'")
    if fmt != "coordinate":
        raise MatrixMarketError(1, f"unsupported format '{fmt}' (only coordinate)")
    if field not in _FIELDS:
        raise MatrixMarketError(1, f"unknown field '{field}'")
    if field not in ("real", "integer"):
        raise MatrixMarketError(1, f"unsupported field '{field}'")
    if symmetry not in _SYMMETRIES:
        raise MatrixMarketError(1, f"unknown symmetry '{symmetry}'")
    if symmetry not in ("general", "symmetric"):
        raise MatrixMarketError(1, f"unsupported symmetry '{symmetry}'")

    i = 1
    while i < len(lines) and (not lines[i].strip() or lines[i].lstrip().startswith("%")):
        i += 1
    if i == len(lines):
        raise MatrixMarketError(i, "missing size line")
    size = lines[i].split()
    try:
        m, p, nnz = (int(t) for t in size)
    except ValueError:
        raise MatrixMarketError(i + 1, f"bad size line '{lines[i].strip()}'") from None
    if m < 1 or p < 1 or nnz < 0:
        raise MatrixMarketError(i + 1, "dimensions must be positive")
    if symmetry == "symmetric" and m != p:
        raise MatrixMarketError(i + 1, f"symmetric matrix must be square, got {m}x{p}")

    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.float64)
    count = 0
    last = i + 1
    for lineno in range(i + 2, len(lines) + 1):
        text = lines[lineno - 1].strip()
        if not text or text.startswith("%"):
            continue
        last = lineno
        if count == nnz:
            raise MatrixMarketError(lineno, f"more than the declared {nnz} entries")
        parts = text.split()
        if len(parts) != 3:
            raise MatrixMarketError(lineno, f"expected 'row col value', got '{text}'")
        try:
            r, c = int(parts[0]), int(parts[1])
            v = float(parts[2])
        except ValueError:
            raise MatrixMarketError(lineno, f"cannot parse entry '{text}'") from None
        if not (1 <= r <= m and 1 <= c <= p):
            raise MatrixMarketError(lineno, f"index ({r}, {c}) outside {m}x{p}")
        if not math.isfinite(v):
            raise MatrixMarketError(lineno, f"nonfinite value '{parts[2]}'")
        if symmetry == "symmetric" and r < c:
            raise MatrixMarketError(lineno, f"entry ({r}, {c}) above the diagonal in a symmetric file")
        rows[count], cols[count], vals[count] = r, c, v
        count += 1
    if count != nnz:
        raise MatrixMarketError(last, f"expected {nnz} entries, found {count}")
    return (m, p), symmetry, rows, cols, vals, i + 1


def read_matrix_market(path) -> SparseSymmetric:
    """Read a symmetric matrix in Matrix Market coordinate format.

    Examples
    --------
    A file with header ``%%MatrixMarket matrix coordinate real symmetric``,
    size line ``2 2 2`` and entries ``1 1 2.0`` and ``2 1 1.0`` gives the
    matrix ``[[2, 1], [1, 2]]`` with two stored triplets.
    """
    (m, p), symmetry, rows, cols, vals, size_line = _parse(path)
    if symmetry == "symmetric":
        return SparseSymmetric(m, rows, cols, vals)
    if m != p:
        raise MatrixMarketError(size_line, f"matrix must be square, got {m}x{p}")
    full = sp.coo_matrix((vals, (rows - 1, cols - 1)), shape=(m, m)).tocsr()
    scale = float(np.max(np.abs(full.data))) if full.nnz else 0.0
    defect = abs(full - full.T)
    if defect.nnz and float(defect.max()) > 1e-14 * scale:
        raise MatrixMarketError(size_line, "general matrix is not symmetric")
    low = sp.tril(full).tocoo()
    return SparseSymmetric(m, low.row + 1, low.col + 1, low.data)


def read_rectangular(path) -> sp.csr_matrix:
    """Read any real ``general`` or ``symmetric`` coordinate file as a CSR matrix."""
    (m, p), symmetry, rows, cols, vals, _ = _parse(path)
    if symmetry == "symmetric":
        off = rows != cols
        rows, cols, vals = (np.concatenate([rows, cols[off]]), np.concatenate([cols, rows[off]]),
                            np.concatenate([vals, vals[off]]))
    return sp.coo_matrix((vals, (rows - 1, cols - 1)), shape=(m, p)).tocsr()


def write_matrix_market(M: SparseSymmetric, path, comment: str | None = None) -> None:
    """Write the stored triangle of ``M`` with shortest round-trip float text."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("%%MatrixMarket matrix coordinate real symmetric\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{M.n} {M.n} {M.nnz}\n")
        for r, c, v in zip(M.rows, M.cols, M.vals):
            fh.write(f"{int(r)} {int(c)} {float(v)!r}\n")


def read_vector(path, n: int | None = None) -> np.ndarray:
    """Read a right-hand side: one number per line, or a Matrix Market array/coordinate vector."""
    text = Path(path).read_text(encoding="ascii").splitlines()
    if text and text[0].startswith("%%MatrixMarket"):
        fmt = text[0].split()[2].lower()
        body = [(k + 1, t) for k, t in enumerate(text) if t.strip() and not t.lstrip().startswith("%")]
        (lineno, size), entries = body[0], body[1:]
        dims = [int(t) for t in size.split()]
        if fmt == "array":
            vals = []
            for lineno, t in entries:
                try:
                    vals.append(float(t))
                except ValueError:
                    raise MatrixMarketError(lineno, f"cannot parse value '{t.strip()}'") from None
            out = np.array(vals)
        else:
            out = np.zeros(dims[0])
            for lineno, t in entries:
                parts = t.split()
                try:
                    out[int(parts[0]) - 1] = float(parts[-1])
                except (ValueError, IndexError):
                    raise MatrixMarketError(lineno, f"cannot parse entry '{t.strip()}'") from None
    else:
        vals = []
        for lineno, t in enumerate(text, start=1):
            if not t.strip() or t.lstrip().startswith("#"):
                continue
            try:
                vals.append(float(t))
            except ValueError:
                raise MatrixMarketError(lineno, f"cannot parse value '{t.strip()}'") from None
        out = np.array(vals)
    if n is not None and out.shape != (n,):
        raise DimensionError(f"right-hand side has length {out.size}, expected {n}")
    return out


@dataclass(frozen=True)
class HistoryRecord:
    """One row of a convergence history; explicit norms and time are optional."""

    k: int
    rnorm_est: float
    arnorm_est: float
    rnorm: float | None = None
    arnorm: float | None = None
    seconds: float | None = None


def _fmt(v):
    return "" if v is None else repr(float(v))


def _unfmt(s):
    return None if s == "" else float(s)


def write_history(records, path) -> None:
    """Write ``records`` as CSV with header ``k,rnorm_est,arnorm_est,rnorm,arnorm,seconds``.

    Floats use ``repr`` so that reading the file back reproduces every value
    bit for bit; missing optional fields are left empty.
    """
    records = list(records)
    if not records:
        raise ValueError("history must contain at least one record")
    ks = [rec.k for rec in records]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("history k must be strictly increasing")
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HISTORY_HEADER)
        for rec in records:
            w.writerow([int(rec.k), _fmt(rec.rnorm_est), _fmt(rec.arnorm_est), _fmt(rec.rnorm),
                        _fmt(rec.arnorm), _fmt(rec.seconds)])


def read_history(path) -> list[HistoryRecord]:
    with open(path, newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != HISTORY_HEADER:
        raise ValueError(f"{path}: missing history header")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(HISTORY_HEADER):
            raise ValueError(f"{path}: line {lineno}: expected {len(HISTORY_HEADER)} fields")
        out.append(HistoryRecord(int(row[0]), float(row[1]), float(row[2]),
                                 _unfmt(row[3]), _unfmt(row[4]), _unfmt(row[5])))
    return out


def records_from_report(report: SolveReport, timing: bool = True) -> list[HistoryRecord]:
    """Convert the histories of a :class:`SolveReport` to records, one per iteration."""
    n = len(report.rnorm_history)
    has_expl = len(report.rnorm_explicit_history) == n
    out = []
    for k in range(n):
        out.append(HistoryRecord(
            k, report.rnorm_history[k], report.arnorm_history[k],
            report.rnorm_explicit_history[k] if has_expl else None,
            report.arnorm_explicit_history[k] if has_expl else None,
            report.time_history[k] if timing and k < len(report.time_history) else None))
    return out
