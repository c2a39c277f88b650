"""Matrix-free symmetric operators.

Every solver in this package touches ``A`` only through
:meth:`SymmetricOperator.apply`.  The constructors below wrap dense arrays,
one-triangle sparse storage, shifts ``A - lambda*I`` and the augmented
operator ``[[0, B], [B^T, 0]]`` of a rectangular ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateInputError, DimensionError

__all__ = [
    "SymmetricOperator",
    "CountingOperator",
    "SparseSymmetric",
    "identity",
    "diagonal",
    "from_dense",
    "from_sparse",
    "shifted",
    "augmented",
    "max_entry_scale",
    "symmetry_defect",
]


class SymmetricOperator:
    """A symmetric linear map given only by its action on vectors.

    Parameters
    ----------
    n
        Dimension of the operator.
    matvec
        Callable mapping a length-``n`` array to ``A @ v``.
    dtype
        Floating point type of the operator (``float64`` or ``float32``).
    norm_bound
        Optional cheap upper bound on ``||A||``, used to scale tolerances.
    """

    def __init__(self, n: int, matvec: Callable[[np.ndarray], np.ndarray],
                 dtype=np.float64, norm_bound: float | None = None):
        if int(n) < 1:
            raise ValueError("operator dimension must be positive")
        self._n = int(n)
        self._matvec = matvec
        self._dtype = np.dtype(dtype)
        self.norm_bound = norm_bound

    @property
    def n(self) -> int:
        return self._n

    @property
    def shape(self) -> tuple[int, int]:
        return (self._n, self._n)

    @property
    def dtype(self) -> np.dtype:
        return self._dtype

    def apply(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=self._dtype)
        if v.shape != (self._n,):
            raise DimensionError(f"expected vector of length {self._n}, got shape {v.shape}")
        return np.asarray(self._matvec(v), dtype=self._dtype)

    __call__ = apply

    def __matmul__(self, v):
        return self.apply(v)

    def to_dense(self) -> np.ndarray:
        """Materialize the operator column by column (for small tests only)."""
        eye = np.eye(self._n, dtype=self._dtype)
        return np.column_stack([self.apply(eye[:, j]) for j in range(self._n)])

    def astype(self, dtype) -> "SymmetricOperator":
        return SymmetricOperator(self._n, self._matvec, dtype, self.norm_bound)

    def __repr__(self):
        return f"{type(self).__name__}(n={self._n}, dtype={self._dtype.name})"


class CountingOperator(SymmetricOperator):
    """Wraps an operator and counts how many times it is applied."""

    def __init__(self, op: SymmetricOperator):
        super().__init__(op.n, op.apply, op.dtype, op.norm_bound)
        self.count = 0

    def apply(self, v):
        self.count += 1
        return super().apply(v)

    __call__ = apply


@dataclass(frozen=True)
class SparseSymmetric:
    """Symmetric matrix stored as one triangle of coordinate triplets.

    Indices are 1-based, as in Matrix Market files, and canonicalized to the
    lower triangle (``row >= col``); duplicates are summed on construction.
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValueError("dimension must be positive")
        rows = np.asarray(self.rows, dtype=np.int64).ravel()
        cols = np.asarray(self.cols, dtype=np.int64).ravel()
        vals = np.asarray(self.vals, dtype=np.float64).ravel()
        if not (rows.shape == cols.shape == vals.shape):
            raise ValueError("rows, cols and vals must have equal length")
        if rows.size and (rows.min() < 1 or cols.min() < 1 or rows.max() > n or cols.max() > n):
            raise ValueError(f"indices must lie in [1, {n}]")
        lo, hi = np.maximum(rows, cols) - 1, np.minimum(rows, cols) - 1
        coo = sp.coo_matrix((vals, (lo, hi)), shape=(n, n))
        coo.sum_duplicates()
        for name, arr in (("rows", coo.row.astype(np.int64) + 1), ("cols", coo.col.astype(np.int64) + 1),
                          ("vals", coo.data.astype(np.float64))):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "n", n)

    @classmethod
    def from_dense(cls, M) -> "SparseSymmetric":
        M = np.asarray(M, dtype=np.float64)
        r, c = np.nonzero(np.tril(M))
        return cls(M.shape[0], r + 1, c + 1, M[r, c])

    @property
    def nnz(self) -> int:
        return int(self.vals.size)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.vals))) if self.vals.size else 0.0

    def to_csr(self) -> sp.csr_matrix:
        i, j = self.rows - 1, self.cols - 1
        low = sp.coo_matrix((self.vals, (i, j)), shape=(self.n, self.n))
        off = i != j
        up = sp.coo_matrix((self.vals[off], (j[off], i[off])), shape=(self.n, self.n))
        return (low + up).tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()

    def scaled(self, factor: float) -> "SparseSymmetric":
        return SparseSymmetric(self.n, self.rows, self.cols, self.vals * factor)

    def divided(self, divisor: float) -> "SparseSymmetric":
        return SparseSymmetric(self.n, self.rows, self.cols, self.vals / divisor)


def identity(n: int, dtype=np.float64) -> SymmetricOperator:
    return SymmetricOperator(n, lambda v: v.copy(), dtype, norm_bound=1.0)


def diagonal(d, dtype=np.float64) -> SymmetricOperator:
    d = np.asarray(d, dtype=dtype).ravel()
    return SymmetricOperator(d.size, lambda v: d * v, dtype,
                             norm_bound=float(np.max(np.abs(d))) if d.size else 0.0)


def from_dense(M, dtype=np.float64, check: bool = True, rtol: float = 1e-12) -> SymmetricOperator:
    """Wrap a dense symmetric array.  ``check`` rejects nonsymmetric input."""
    M = np.array(M, dtype=dtype)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if check:
        scale = float(np.max(np.abs(M))) if M.size else 0.0
        if np.max(np.abs(M - M.T), initial=0.0) > rtol * max(scale, np.finfo(dtype).tiny):
            raise ValueError("matrix is not symmetric")
    return SymmetricOperator(M.shape[0], lambda v: M @ v, dtype,
                             norm_bound=float(np.linalg.norm(M, 1)))


def from_sparse(M: SparseSymmetric, dtype=np.float64) -> SymmetricOperator:
    # Mirrored off-diagonal entries are materialized once at construction.
    csr = M.to_csr().astype(dtype)
    bound = float(abs(csr).sum(axis=0).max()) if M.nnz else 0.0
    return SymmetricOperator(M.n, lambda v: csr @ v, dtype, norm_bound=bound)


def shifted(op: SymmetricOperator, lam: float) -> SymmetricOperator:
    """Operator computing ``(A - lam*I) v``."""
    lam = float(lam)
    if lam == 0.0:
        return SymmetricOperator(op.n, op.apply, op.dtype, op.norm_bound)
    bound = None if op.norm_bound is None else op.norm_bound + abs(lam)
    return SymmetricOperator(op.n, lambda v: op.apply(v) - lam * v, op.dtype, bound)


def augmented(B, dtype=np.float64) -> SymmetricOperator:
    """Operator of size ``m + p`` computing ``(B v, B^T u)`` from ``(u, v)``."""
    if sp.issparse(B):
        B = B.tocsr().astype(dtype)
        BT = B.T.tocsr()
    else:
        B = np.asarray(B, dtype=dtype)
        if B.ndim == 1:
            B = B[:, None]
        BT = B.T
    if B.ndim != 2 or B.shape[0] == 0 or B.shape[1] == 0:
        raise DegenerateInputError("augmented operator needs a nonempty matrix")
    m, p = B.shape

    def matvec(w):
        return np.concatenate([B @ w[m:], BT @ w[:m]])

    return SymmetricOperator(m + p, matvec, dtype)


def max_entry_scale(M: SparseSymmetric) -> tuple[SparseSymmetric, float]:
    """Return ``(M / alpha, alpha)`` with ``alpha = max |M_ij|``."""
    alpha = M.max_abs()
    if alpha == 0.0:
        raise DegenerateInputError("cannot scale an all-zero matrix")
    # division, not multiplication by 1/alpha, so the largest entry becomes exactly 1
    return M.divided(alpha), alpha


def symmetry_defect(op: SymmetricOperator, u, v) -> float:
    """``|u.(Av) - v.(Au)|``; zero for an exactly symmetric operator."""
    return abs(float(np.dot(u, op.apply(v)) - np.dot(v, op.apply(u))))
