"""Dense reference computations used as independent test oracles.

Nothing here shares code with the package: Krylov bases are built with full
reorthogonalization and subproblems are solved with LAPACK least squares.
"""

import numpy as np


def random_orthogonal(n, rng):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def from_spectrum(eigs, rng):
    """Symmetric ``Q diag(eigs) Q^T`` (exactly symmetric) and its ``Q``."""
    Q = random_orthogonal(len(eigs), rng)
    A = (Q * np.asarray(eigs, dtype=float)) @ Q.T
    return (A + A.T) / 2, Q


def spd(n, rng, lo=0.5, hi=5.0):
    return from_spectrum(np.linspace(lo, hi, n), rng)[0]


def indefinite(n, rng, lo=0.5, hi=5.0):
    mags = np.linspace(lo, hi, n)
    signs = np.where(rng.permutation(n) % 2 == 0, 1.0, -1.0)
    return from_spectrum(mags * signs, rng)[0]


def singular(n, rng, nullity=3, lo=0.5, hi=5.0):
    """Indefinite with a ``nullity``-dimensional null space."""
    mags = np.linspace(lo, hi, n - nullity)
    signs = np.where(rng.permutation(n - nullity) % 2 == 0, 1.0, -1.0)
    return from_spectrum(np.r_[np.zeros(nullity), mags * signs], rng)[0]


def psd_rank_deficient(n, rng, nullity=3, lo=0.5, hi=5.0):
    """PSD with known pseudoinverse; returns ``(A, A_pinv, P_range)``."""
    eigs = np.r_[np.zeros(nullity), np.linspace(lo, hi, n - nullity)]
    A, Q = from_spectrum(eigs, rng)
    inv = np.r_[np.zeros(nullity), 1.0 / eigs[nullity:]]
    Ap = (Q * inv) @ Q.T
    Qr = Q[:, nullity:]
    return A, (Ap + Ap.T) / 2, Qr @ Qr.T


def lanczos_full(A, b, k):
    """Lanczos with full reorthogonalization: ``V`` (n x (k+1)), ``T`` ((k+1) x k)."""
    n = len(b)
    V = np.zeros((n, k + 1))
    T = np.zeros((k + 1, k))
    V[:, 0] = b / np.linalg.norm(b)
    for j in range(k):
        w = A @ V[:, j]
        for _ in range(2):
            w -= V[:, : j + 1] @ (V[:, : j + 1].T @ w)
        T[j, j] = V[:, j] @ (A @ V[:, j])
        beta = np.linalg.norm(w)
        T[j + 1, j] = beta
        if j + 1 < k:
            T[j, j + 1] = beta
        if beta == 0:
            return V[:, : j + 1], T[: j + 2, : j + 1]
        V[:, j + 1] = w / beta
    return V, T


def krylov_basis(A, b, k):
    """Orthonormal basis of ``K_k(A, b)``."""
    V, _ = lanczos_full(A, b, k)
    return V[:, :k]


def min_ar(A, b, k):
    """``min ||A(b - A x)||`` over ``x`` in ``K_k(A, b)``, and the minimizer."""
    V = krylov_basis(A, b, k)
    M = A @ (A @ V)
    y, *_ = np.linalg.lstsq(M, A @ b, rcond=None)
    x = V @ y
    return float(np.linalg.norm(A @ (b - A @ x))), x


def min_r(A, b, k):
    """``min ||b - A x||`` over ``K_k(A, b)`` (the MINRES iterate)."""
    V = krylov_basis(A, b, k)
    y, *_ = np.linalg.lstsq(A @ V, b, rcond=None)
    x = V @ y
    return float(np.linalg.norm(b - A @ x)), x


def min_a_error(A, b, k):
    """CG iterate: minimize ``||x* - x||_A`` over ``K_k(A, b)`` for SPD ``A``."""
    V = krylov_basis(A, b, k)
    y = np.linalg.solve(V.T @ A @ V, V.T @ b)
    return V @ y


def subproblem_t(T, beta1, k):
    """Solve ``min ||T_{k+2,k+1} T_{k+1,k} y - beta1 alpha1 e1 - beta1 beta2 e2||`` densely."""
    M = T[: k + 2, : k + 1] @ T[: k + 1, :k]
    rhs = np.zeros(k + 2)
    rhs[0] = beta1 * T[0, 0]
    rhs[1] = beta1 * T[1, 0]
    y, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return float(np.linalg.norm(M @ y - rhs)), y


def explicit(A, b, x):
    r = b - A @ x
    return float(np.linalg.norm(r)), float(np.linalg.norm(A @ r))
