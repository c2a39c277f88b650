"""Eigenvector and singular-vector drivers built on MINARES.

For singular symmetric ``A`` and generic ``b``, MINARES run to ``A r = 0``
leaves a residual ``r = b - A x`` that is a null vector of ``A``.  Applied to
``A - lambda I`` this yields inverse iteration in one solve when ``lambda``
is an eigenvalue, and Rayleigh-quotient iteration when ``lambda`` is
refreshed between solves.  Singular triplets of a rectangular ``B`` are
eigenpairs of the augmented operator ``[[0, B], [B^T, 0]]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoNullvectorError
from .minares import minares_solve
from .operator import SymmetricOperator, augmented, shifted
from .report import StoppingCriteria

__all__ = ["EigenResult", "SingularTriplet", "nullvector", "inverse_iteration", "singular_triplet"]


@dataclass
class EigenResult:
    """Eigenpair estimate with an explicitly computed residual ``||A v - lam v||``."""

    lam: float
    v: np.ndarray
    residual: float
    iterations: int
    matvecs: int
    status: str

    @property
    def converged(self) -> bool:
        return self.status == "converged"


@dataclass
class SingularTriplet:
    u: np.ndarray
    v: np.ndarray
    sigma: float
    # explicit ||B v - sigma u|| and ||B^T u - sigma v||
    residual_u: float
    residual_v: float
    iterations: int
    matvecs: int
    status: str

    @property
    def residual(self) -> float:
        return self.residual_u + self.residual_v

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def _seed_vector(n, seed, dtype):
    rng = np.random.default_rng(seed)
    b = rng.standard_normal(n).astype(dtype)
    return b / np.linalg.norm(b)


def _inner_criteria(n, rel_Ar, k_max):
    # A r -> 0 is the goal and r itself stays away from zero, so ||r|| is
    # only used as a guard against wasting iterations on a nonsingular op.
    return StoppingCriteria(eps_r=0.0, eps_Ar=0.0, rel_r=1e-14, rel_Ar=rel_Ar,
                            k_max=k_max if k_max is not None else 10 * n,
                            record_history=False)


def nullvector(op: SymmetricOperator, seed_rhs=None, *, rel_Ar: float = 1e-14,
               seed: int = 0, k_max: int | None = None, full_output: bool = False):
    """Return ``r = b - A x`` with ``A r ~ 0`` from one MINARES solve.

    Parameters
    ----------
    op
        Symmetric operator suspected to be singular.
    seed_rhs
        Right-hand side ``b``; a seeded random unit vector when omitted.
    rel_Ar
        Stop once ``||A r|| <= rel_Ar * ||A b||``.
    full_output
        Also return the inner :class:`SolveReport`.

    Raises
    ------
    NoNullvectorError
        If ``||r||`` is negligible, i.e. ``b`` lay in the range of ``A``.
    """
    b = _seed_vector(op.n, seed, op.dtype) if seed_rhs is None else np.asarray(seed_rhs, dtype=op.dtype)
    x, rep = minares_solve(op, b, _inner_criteria(op.n, rel_Ar, k_max))
    r = b - op.apply(x)
    rnorm = float(np.linalg.norm(r))
    if rnorm <= math.sqrt(np.finfo(op.dtype).eps) * float(np.linalg.norm(b)):
        raise NoNullvectorError(f"residual norm {rnorm:.3e} is negligible; operator looks nonsingular")
    return (r, rep) if full_output else r


def _best_candidate(op, cands, shift):
    """Pick the candidate whose Rayleigh quotient lies closest to ``shift``.

    Inverse iteration targets the eigenvalue nearest the shift.  Callers
    must drop candidates that are numerically noise, whose quotient is
    arbitrary.
    """
    best, best_key = None, None
    for c in cands:
        nc = float(np.linalg.norm(c))
        if nc == 0.0 or not math.isfinite(nc):
            continue
        c = c / nc
        ac = op.apply(c)
        lam = float(c @ ac)
        res = float(np.linalg.norm(ac - lam * c))
        key = (abs(lam - shift), res)
        if best is None or key < best_key:
            best, best_key = (lam, c, res), key
    return best


def inverse_iteration(op: SymmetricOperator, lambda0: float, outer_iters: int = 5, *,
                      rayleigh: bool = False, warmup: int = 2, tol: float = 1e-10,
                      rel_Ar: float = 1e-14, seed: int = 0,
                      k_max: int | None = None) -> EigenResult:
    """Inverse (or Rayleigh-quotient) iteration with MINARES inner solves.

    Each outer step solves ``(A - lam I) x = v`` and takes as the next ``v``
    whichever of ``r/||r||`` (a null vector when ``lam`` is an eigenvalue)
    and ``x/||x||`` (the classical inverse-iteration update) has its Rayleigh
    quotient closest to ``lam``.  With
    ``rayleigh`` the shift is replaced by ``v^T A v`` after every step past
    the first ``warmup`` fixed-shift steps; the warmup keeps a poor random
    start from steering the quotient toward a neighbouring eigenvalue.

    ``status`` is ``"converged"`` once ``||A v - (v^T A v) v|| <= tol``,
    ``"stagnated"`` if an outer step fails to reduce the residual, and
    ``"max_outer_iterations"`` otherwise.
    """
    if outer_iters < 1:
        raise ValueError("outer_iters must be >= 1")
    v = _seed_vector(op.n, seed, op.dtype)
    shift = float(lambda0)
    matvecs = 0
    best = None
    status = "max_outer_iterations"
    it = 0
    for it in range(1, outer_iters + 1):
        sop = shifted(op, shift)
        x, rep = minares_solve(sop, v, _inner_criteria(op.n, rel_Ar, k_max))
        r = v - sop.apply(x)
        matvecs += rep.matvecs + 1
        # after a nonsingular solve r is rounding noise, not a null vector
        noise = math.sqrt(np.finfo(op.dtype).eps) * float(np.linalg.norm(v))
        cands = (r, x) if float(np.linalg.norm(r)) > noise else (x,)
        cand = _best_candidate(op, cands, shift)
        matvecs += 2
        if cand is None:
            status = "stagnated"
            break
        if best is not None and cand[2] >= best[2]:
            status = "stagnated"
            break
        best = cand
        v = best[1]
        if best[2] <= tol:
            status = "converged"
            break
        if rayleigh and it >= warmup:
            shift = best[0]
    if best is None:
        return EigenResult(shift, v, math.inf, it, matvecs, status)
    return EigenResult(best[0], best[1], best[2], it, matvecs, status)


def singular_triplet(B, sigma0: float, outer_iters: int = 5, *, rayleigh: bool = False,
                     tol: float = 1e-10, seed: int = 0, **kwargs) -> SingularTriplet:
    """Singular triplet of a rectangular ``B`` near ``sigma0``.

    Runs :func:`inverse_iteration` on the augmented operator and splits the
    eigenvector into ``u`` (first ``m`` entries) and ``v``, each renormalized.
    Extra keyword arguments go to :func:`inverse_iteration`.
    """
    op = augmented(B)
    m = B.shape[0]
    eig = inverse_iteration(op, sigma0, outer_iters, rayleigh=rayleigh, tol=tol, seed=seed, **kwargs)
    u, v = eig.v[:m], eig.v[m:]
    nu, nv = float(np.linalg.norm(u)), float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        # an eigenvector of a zero eigenvalue living in one block only
        return SingularTriplet(u, v, 0.0, math.inf, math.inf, eig.iterations, eig.matvecs, "stagnated")
    u, v = u / nu, v / nv
    Bv = op.apply(np.concatenate([np.zeros(m), v]))[:m]
    BTu = op.apply(np.concatenate([u, np.zeros(v.size)]))[m:]
    sigma = float(u @ Bv)
    res_u = float(np.linalg.norm(Bv - sigma * u))
    res_v = float(np.linalg.norm(BTu - sigma * v))
    return SingularTriplet(u, v, sigma, res_u, res_v, eig.iterations, eig.matvecs + 2, eig.status)
