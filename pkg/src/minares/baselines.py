"""Reference MINRES and LSMR solvers used for comparisons.

MINRES shares the QR recurrences of the Lanczos tridiagonal with MINARES.
LSMR is the standard Golub-Kahan based method with its cheap ``||r_k||``
estimate, specialized to zero damping.
"""

from __future__ import annotations

import math

import numpy as np

from .lanczos import default_beta_tol, lanczos_init, lanczos_step
from .minares import TQrCarry, sym_ortho
from .operator import SymmetricOperator
from .report import (SolveReport, Status, StoppingCriteria, _Recorder, explicit_norms,
                     final_status, thresholds)

__all__ = ["minres_solve", "lsmr_solve"]


def _setup(op, b, crit, name):
    b = np.asarray(b, dtype=op.dtype)
    rep = SolveReport(name)
    rec = _Recorder(rep, crit)
    x = np.zeros(op.n, dtype=op.dtype)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        rep.status, rep.rnorm, rep.arnorm = Status.ZERO_RHS, 0.0, 0.0
        rec.record(x, 0.0, 0.0, 0, (0.0, 0.0) if crit.explicit_norms else None)
    return b, x, rep, rec, bnorm


def minres_solve(op: SymmetricOperator, b, criteria: StoppingCriteria | None = None, **kwargs):
    """MINRES: minimize ``||b - A x||`` over ``K_k(A, b)``.

    ``||A r_k||`` is estimated by ``|chi_bar_{k+1}| * ||(lambda_bar_{k+1}, gamma_bar_{k+1})||``,
    the norm of the next column of the rotated tridiagonal.
    """
    crit = criteria if criteria is not None else StoppingCriteria(**kwargs)
    b, x, rep, rec, beta1 = _setup(op, b, crit, "minres")
    if rep.status is Status.ZERO_RHS:
        return x, rep

    state = lanczos_init(op, b)
    alpha1, beta2, _ = lanczos_step(state, op, crit.beta_tol)
    matvecs = 1
    ell = None
    if state.finished:
        beta2, ell = 0.0, 1
    tqr = TQrCarry(lambda_bar=alpha1, gamma_bar=beta2)
    chi_bar = beta1
    w1 = np.zeros(op.n, dtype=op.dtype)
    w2 = np.zeros(op.n, dtype=op.dtype)

    rnorm = beta1
    arnorm = beta1 * math.hypot(alpha1, beta2)
    tol_r, tol_ar = thresholds(crit, beta1, arnorm)
    kmax = crit.max_iterations(op.n)

    def measure():
        if crit.explicit_norms:
            rep.extra_matvecs += 2
            return explicit_norms(op, b, x)
        return None

    expl = measure()
    rec.record(x, rnorm, arnorm, matvecs, expl)
    beta_k1 = beta2
    gamma_prev = eps_prev = eps_prev2 = 0.0
    status = None
    k = 0
    while True:
        r_test, ar_test = expl if expl is not None else (rnorm, arnorm)
        if r_test <= tol_r or ar_test <= tol_ar or k >= kmax:
            break
        final = ell is not None and k + 1 == ell
        if final:
            v_k = state.v_cur
            alpha_next = beta_next2 = 0.0
        else:
            v_k = state.v_prev
            alpha_next, beta_next2, _ = lanczos_step(state, op, crit.beta_tol)
            matvecs += 1
            if state.finished:
                beta_next2, ell = 0.0, k + 2
        tqr.step(beta_k1, alpha_next, beta_next2, final=final)
        lam = tqr.lam
        if final:
            tol = crit.beta_tol if crit.beta_tol is not None else default_beta_tol(state.anorm, op.dtype)
            if abs(lam) <= tol:
                status = Status.BREAKDOWN_INCONSISTENT
                break
        if lam == 0.0 or not math.isfinite(lam):
            status = Status.NUMERICAL_FAILURE
            break
        k += 1
        chi = tqr.c * chi_bar
        chi_bar = tqr.s * chi_bar
        w = (v_k - gamma_prev * w1 - eps_prev2 * w2) / lam
        w2, w1 = w1, w
        x = x + chi * w
        rnorm = abs(chi_bar)
        arnorm = rnorm * math.hypot(tqr.lambda_bar, tqr.gamma_bar)
        if not (math.isfinite(rnorm) and math.isfinite(arnorm)):
            status = Status.NUMERICAL_FAILURE
            break
        expl = measure()
        rec.record(x, rnorm, arnorm, matvecs, expl)
        gamma_prev, eps_prev2, eps_prev = tqr.gamma, eps_prev, tqr.eps
        beta_k1 = beta_next2
        if final:
            status = Status.BREAKDOWN_CONSISTENT
            break

    r_fin, ar_fin = expl if expl is not None else (rnorm, arnorm)
    if status is not Status.NUMERICAL_FAILURE:
        status = final_status(r_fin, ar_fin, tol_r, tol_ar, status or Status.MAX_ITERATIONS)
    rep.status, rep.iterations, rep.matvecs = status, k, matvecs
    rep.rnorm, rep.arnorm, rep.ell = rnorm, arnorm, ell
    return x, rep


def lsmr_solve(op: SymmetricOperator, b, criteria: StoppingCriteria | None = None,
               rmatvec=None, **kwargs):
    """LSMR: minimize ``||A^T r_k||`` over ``K_k(A^T A, A^T b)``.

    ``op.apply`` is used for both ``A`` and ``A^T`` unless ``rmatvec`` is
    given.  Each iteration costs two operator products, plus one at setup.
    """
    crit = criteria if criteria is not None else StoppingCriteria(**kwargs)
    b, x, rep, rec, beta = _setup(op, b, crit, "lsmr")
    if rep.status is Status.ZERO_RHS:
        return x, rep
    rmat = rmatvec if rmatvec is not None else op.apply

    # Golub-Kahan bidiagonalization start: beta_1 u_1 = b, alpha_1 v_1 = A^T u_1
    u = b / beta
    v = np.asarray(rmat(u), dtype=op.dtype)
    matvecs = 1
    alpha = float(np.linalg.norm(v))
    if alpha > 0.0:
        v = v / alpha

    zetabar = alpha * beta
    alphabar = alpha
    rho = rhobar = cbar = 1.0
    sbar = 0.0
    h = v.copy()
    hbar = np.zeros_like(x)

    # ||r_k|| estimate carries
    betadd, betad = beta, 0.0
    rhodold = 1.0
    tautildeold = thetatilde = zeta = 0.0

    rnorm, arnorm = beta, abs(zetabar)
    tol_r, tol_ar = thresholds(crit, beta, arnorm)
    kmax = crit.max_iterations(op.n)

    def measure():
        if crit.explicit_norms:
            rep.extra_matvecs += 2
            return explicit_norms(op, b, x)
        return None

    expl = measure()
    rec.record(x, rnorm, arnorm, matvecs, expl)
    status = None
    k = 0
    while True:
        r_test, ar_test = expl if expl is not None else (rnorm, arnorm)
        if r_test <= tol_r or ar_test <= tol_ar or k >= kmax:
            break
        if alpha == 0.0:
            # A^T b = 0 or an exact invariant subspace: nothing more to gain
            status = Status.BREAKDOWN_INCONSISTENT
            break
        k += 1
        u = op.apply(v) - alpha * u
        matvecs += 1
        beta = float(np.linalg.norm(u))
        if beta > 0.0:
            u = u / beta
            v = np.asarray(rmat(u), dtype=op.dtype) - beta * v
            matvecs += 1
            alpha = float(np.linalg.norm(v))
            if alpha > 0.0:
                v = v / alpha
        else:
            alpha = 0.0

        # rotation zeroing beta_{k+1} (no damping, so the hat rotation is trivial)
        rhoold = rho
        c, s, rho = sym_ortho(alphabar, beta)
        thetanew = s * alpha
        alphabar = c * alpha

        # rotation turning the upper bidiagonal R into lower bidiagonal form
        rhobarold = rhobar
        zetaold = zeta
        thetabar = sbar * rho
        cbar, sbar, rhobar = sym_ortho(cbar * rho, thetanew)
        zeta = cbar * zetabar
        zetabar = -sbar * zetabar
        if rho == 0.0 or rhobar == 0.0:
            status = Status.NUMERICAL_FAILURE
            break

        hbar = h - (thetabar * rho / (rhoold * rhobarold)) * hbar
        x = x + (zeta / (rho * rhobar)) * hbar
        h = v - (thetanew / rho) * h

        # ||r_k|| via the extra QR of the lower bidiagonal factor
        betaacute = betadd
        betahat = c * betaacute
        betadd = -s * betaacute
        thetatildeold = thetatilde
        ctildeold, stildeold, rhotildeold = sym_ortho(rhodold, thetabar)
        thetatilde = stildeold * rhobar
        rhodold = ctildeold * rhobar
        betad = -stildeold * betad + ctildeold * betahat
        tautildeold = (zetaold - thetatildeold * tautildeold) / rhotildeold
        taud = (zeta - thetatilde * tautildeold) / rhodold
        rnorm = math.sqrt((betad - taud) ** 2 + betadd ** 2)
        arnorm = abs(zetabar)
        if not (math.isfinite(rnorm) and math.isfinite(arnorm)):
            status = Status.NUMERICAL_FAILURE
            break
        expl = measure()
        rec.record(x, rnorm, arnorm, matvecs, expl)
        if beta == 0.0:
            status = Status.BREAKDOWN_CONSISTENT
            break

    r_fin, ar_fin = expl if expl is not None else (rnorm, arnorm)
    if status is not Status.NUMERICAL_FAILURE:
        status = final_status(r_fin, ar_fin, tol_r, tol_ar, status or Status.MAX_ITERATIONS)
    rep.status, rep.iterations, rep.matvecs = status, k, matvecs
    rep.rnorm, rep.arnorm = rnorm, arnorm
    return x, rep
