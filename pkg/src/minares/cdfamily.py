"""Conjugate-direction solvers CG, CR and CAR for SPD systems.

All three are exact-linesearch descent methods on a quadratic ``f`` with
constant Hessian ``H`` (``A``, ``A^2`` and ``A^4`` respectively):

    alpha_k = rho_k / p_k^T H p_k,   beta_k = rho_{k+1} / rho_k,
    rho_k = -grad f(x_k)^T r_k.

They differ only in which auxiliary products are carried.  CAR keeps
``s = A r``, ``q = A p``, ``t = A s`` and ``u = A q`` so that a single
product ``t_{k+1} = A s_{k+1}`` is needed per iteration.
"""

from __future__ import annotations

import math

import numpy as np

from .operator import SymmetricOperator
from .report import (SolveReport, Status, StoppingCriteria, _Recorder, explicit_norms,
                     final_status, thresholds)

__all__ = ["cg_solve", "cr_solve", "car_solve"]


def cg_solve(op: SymmetricOperator, b, criteria: StoppingCriteria | None = None, **kwargs):
    """Conjugate gradients; ``||A r_k||`` is only available with explicit norms."""
    return _descent(op, b, criteria or StoppingCriteria(**kwargs), "cg")


def cr_solve(op: SymmetricOperator, b, criteria: StoppingCriteria | None = None, **kwargs):
    return _descent(op, b, criteria or StoppingCriteria(**kwargs), "cr")


def car_solve(op: SymmetricOperator, b, criteria: StoppingCriteria | None = None, **kwargs):
    """Conjugate A-residual method, equivalent to MINARES for SPD ``A``.

    With ``criteria.trace`` set, every iteration stores copies of
    ``x, r, p, s, q, t, u`` and the scalars ``alpha, beta, rho``.
    """
    return _descent(op, b, criteria or StoppingCriteria(**kwargs), "car")


def _descent(op, b, crit, kind):
    b = np.asarray(b, dtype=op.dtype)
    n = op.n
    rep = SolveReport(kind)
    rec = _Recorder(rep, crit)
    x = np.zeros(n, dtype=op.dtype)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        rep.status, rep.rnorm, rep.arnorm = Status.ZERO_RHS, 0.0, 0.0
        rec.record(x, 0.0, 0.0, 0, (0.0, 0.0) if crit.explicit_norms else None)
        return x, rep

    r = b.copy()
    p = r.copy()
    s = q = t = u = None
    if kind == "cg":
        q = op.apply(p)
        rho = float(r @ r)
        matvecs = 1
    elif kind == "cr":
        s = op.apply(r)
        q = s.copy()
        rho = float(r @ s)
        matvecs = 1
    else:
        s = op.apply(r)
        q = s.copy()
        t = op.apply(s)
        u = t.copy()
        rho = float(s @ t)
        matvecs = 2

    def norms():
        # CG carries no A r, so its A-residual is unknown without explicit norms
        return (float(np.linalg.norm(r)),
                float(np.linalg.norm(s)) if s is not None else math.inf)

    def measure():
        if crit.explicit_norms:
            rep.extra_matvecs += 2
            return explicit_norms(op, b, x)
        return None

    rnorm, arnorm = norms()
    abnorm = arnorm if s is not None else float(np.linalg.norm(op.apply(b))) if crit.rel_Ar else 0.0
    tol_r, tol_ar = thresholds(crit, bnorm, abnorm)
    kmax = crit.max_iterations(n)
    expl = measure()
    rec.record(x, rnorm, arnorm if s is not None else math.nan, matvecs, expl)

    def snapshot(alpha, beta):
        rep.trace.append(dict(k=k, x=x.copy(), r=r.copy(), p=p.copy(),
                              s=None if s is None else s.copy(), q=q.copy(),
                              t=None if t is None else t.copy(), u=None if u is None else u.copy(),
                              alpha=alpha, beta=beta, rho=rho))

    status = None
    k = 0
    while True:
        r_test, ar_test = expl if expl is not None else (rnorm, arnorm)
        if r_test <= tol_r or ar_test <= tol_ar or k >= kmax:
            break
        if kind == "cg":
            denom = float(p @ q)
        elif kind == "cr":
            denom = float(q @ q)
        else:
            denom = float(u @ u)
        alpha = rho / denom if denom != 0.0 else math.nan
        if not math.isfinite(alpha) or alpha <= 0.0:
            status = Status.INDEFINITE
            break
        if crit.trace:
            snapshot(alpha, None)
        x = x + alpha * p
        r = r - alpha * q
        if kind == "cg":
            rho_next = float(r @ r)
        elif kind == "cr":
            s = op.apply(r)
            matvecs += 1
            rho_next = float(r @ s)
        else:
            s = s - alpha * u
            t = op.apply(s)
            matvecs += 1
            rho_next = float(s @ t)
        k += 1
        if rho_next < 0.0 or not math.isfinite(rho_next):
            status = Status.INDEFINITE
            rnorm, arnorm = norms()
            break
        beta = rho_next / rho
        rho = rho_next
        if crit.trace:
            rep.trace[-1]["beta"] = beta
        p = r + beta * p
        if kind == "cg":
            q = op.apply(p)
            matvecs += 1
        elif kind == "cr":
            q = s + beta * q
        else:
            q = s + beta * q
            u = t + beta * u
        rnorm, arnorm = norms()
        expl = measure()
        rec.record(x, rnorm, arnorm if s is not None else math.nan, matvecs, expl)
        if rho == 0.0:
            # ||A r|| vanished exactly
            status = Status.CONVERGED_AR if kind != "cg" else Status.CONVERGED_R
            break

    if crit.trace:
        # final state, so property sweeps can include the last iterate
        snapshot(None, None)
    r_fin, ar_fin = expl if expl is not None else (rnorm, arnorm)
    if status is not Status.INDEFINITE:
        status = final_status(r_fin, ar_fin, tol_r, tol_ar, status or Status.MAX_ITERATIONS)
    rep.status = status
    rep.iterations = k
    rep.matvecs = matvecs
    rep.rnorm = rnorm
    rep.arnorm = arnorm if s is not None else math.nan
    return x, rep
