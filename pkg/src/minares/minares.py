"""MINARES: minimize ``||A r_k||`` over the Lanczos Krylov subspaces.

The solver couples four running factorizations, each advanced by one
column per iteration with 2x2 symmetric reflections ``[[c, s], [s, -c]]``:

* QR of the Lanczos tridiagonal ``T_{k+1,k}``   (:class:`TQrCarry`),
* QR of ``N_k = T_{k+2,k+1} Q_k [I; 0]``         (:class:`NQrCarry`),
* the rotated right-hand side ``z``              (:class:`ZCarry`),
* LQ of the triangular factor ``U_k`` together with the vectors needed to
  estimate ``||r_k||``                           (:class:`UlqCarry`,
  :class:`ResidualCarry`).

The iterate is updated through two-deep direction recurrences so storage
stays ``O(n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalBreakdown
from .lanczos import default_beta_tol, lanczos_init, lanczos_step
from .operator import SymmetricOperator
from .report import (SolveReport, Status, StoppingCriteria, _Recorder, explicit_norms,
                     final_status, thresholds)

__all__ = [
    "sym_ortho",
    "TQrCarry",
    "NQrCarry",
    "ZCarry",
    "UlqCarry",
    "ResidualCarry",
    "Directions",
    "x_update",
    "residual_norm_update",
    "minares_solve",
]


def sym_ortho(a: float, b: float) -> tuple[float, float, float]:
    """Reflection ``[[c, s], [s, -c]]`` with ``c*a + s*b = r``, ``s*a - c*b = 0``.

    ``r = hypot(a, b) >= 0``; no sign normalization of ``c`` or ``s``.
    """
    r = math.hypot(a, b)
    if r == 0.0:
        return 1.0, 0.0, 0.0
    return a / r, b / r, r


@dataclass
class TQrCarry:
    """QR of ``T_{k+1,k}``: diagonal ``lam``, superdiagonals ``gamma``, ``eps``.

    Seed with ``lambda_bar = alpha_1`` and ``gamma_bar = beta_2``.
    """

    lambda_bar: float
    gamma_bar: float
    lam: float = 0.0
    c: float = 1.0
    s: float = 0.0
    gamma: float = 0.0
    eps: float = 0.0

    def step(self, beta_next: float, alpha_next: float, beta_next2: float, final: bool = False):
        """Eliminate ``beta_{k+1}`` and fold in column ``k+1`` of ``T``.

        ``final`` marks the last column of a square ``T_ell``: nothing is left
        below the diagonal, so ``lam = lambda_bar`` (possibly zero).
        """
        if final:
            self.c, self.s, self.lam = 1.0, 0.0, self.lambda_bar
        else:
            self.c, self.s, self.lam = sym_ortho(self.lambda_bar, beta_next)
        c, s, gbar = self.c, self.s, self.gamma_bar
        self.gamma = c * gbar + s * alpha_next
        self.eps = s * beta_next2
        self.lambda_bar = s * gbar - c * alpha_next
        self.gamma_bar = -c * beta_next2
        return self


@dataclass
class NQrCarry:
    """QR of ``N_k``, producing the columns ``(rho_{k-2}, phi_{k-1}, mu_k)`` of ``U_k``.

    ``c1/s1`` hold the reflection that zeroes ``gamma_hat_k`` and ``c2/s2`` the
    one that zeroes ``eps_k``, for the latest column; ``c2_prev/s2_prev`` keep
    the second reflection of the column before.
    """

    k: int = 0
    mu_bar: float = 0.0
    gamma_hat: float = 0.0
    lambda_hat: float = 0.0
    mu_ring: float = 0.0
    mu: float = 0.0
    phi_bar: float = 0.0
    phi: float = 0.0
    rho: float = 0.0
    c1: float = 1.0
    s1: float = 0.0
    c2: float = 1.0
    s2: float = 0.0
    c2_prev: float = 1.0
    s2_prev: float = 0.0

    def step(self, lam: float, gamma: float, eps: float, final: bool = False):
        """Take column ``k`` of ``R_k^T`` (``lam, gamma, eps``) and return
        ``(mu_k, phi_{k-1}, rho_{k-2})``."""
        self.k += 1
        k = self.k
        if k == 1:
            self.mu_bar, self.gamma_hat = lam, gamma
            self.phi = self.rho = 0.0
        else:
            if k == 2:
                self.lambda_hat = lam
                self.rho = 0.0
            else:
                self.rho = self.s2_prev * lam
                self.lambda_hat = -self.c2_prev * lam
            self.phi_bar = self.s1 * self.lambda_hat
            self.phi = self.c2 * self.phi_bar + self.s2 * gamma
            self.mu_bar = -self.c1 * self.lambda_hat
            self.gamma_hat = self.s2 * self.phi_bar - self.c2 * gamma
        self.c2_prev, self.s2_prev = self.c2, self.s2
        if final:
            # square N_ell = R_ell^T: the last diagonal needs no reflection
            self.c1, self.s1, self.mu_ring = 1.0, 0.0, self.mu_bar
            self.c2, self.s2, self.mu = 1.0, 0.0, self.mu_bar
        else:
            self.c1, self.s1, self.mu_ring = sym_ortho(self.mu_bar, self.gamma_hat)
            self.c2, self.s2, self.mu = sym_ortho(self.mu_ring, eps)
        return self.mu, self.phi, self.rho


@dataclass
class ZCarry:
    """Rotated right-hand side; ``||A r_k|| = hypot(zeta_bb, zeta_bar)``.

    Seed with ``(beta_1*alpha_1, beta_1*beta_2)``.
    """

    zeta_bb: float
    zeta_bar: float
    zeta_ring: float = 0.0
    zeta: float = 0.0

    def step(self, c1: float, s1: float, c2: float, s2: float) -> float:
        bb, bar = self.zeta_bb, self.zeta_bar
        self.zeta_ring = c1 * bb + s1 * bar
        self.zeta_bb = s1 * bb - c1 * bar
        self.zeta = c2 * self.zeta_ring
        self.zeta_bar = s2 * self.zeta_ring
        return self.zeta

    @property
    def ar_norm(self) -> float:
        return math.hypot(self.zeta_bb, self.zeta_bar)


class Directions:
    """Two-deep recurrences for the columns of ``W_k`` and ``D_k``.

    ``R_k^T W_k^T = V_k^T`` and ``U_k^T D_k^T = W_k^T``, so that
    ``x_k = D_k z_k``.
    """

    def __init__(self, n: int, dtype=np.float64):
        self.w1 = np.zeros(n, dtype)  # w_{k-1}
        self.w2 = np.zeros(n, dtype)  # w_{k-2}
        self.d1 = np.zeros(n, dtype)
        self.d2 = np.zeros(n, dtype)

    def step(self, v, lam, gamma_prev, eps_prev2, mu, phi_prev, rho_prev2):
        if lam == 0.0 or not math.isfinite(lam):
            raise NumericalBreakdown("zero diagonal in the QR factor of T")
        if mu == 0.0 or not math.isfinite(mu):
            raise NumericalBreakdown("zero diagonal in the QR factor of N")
        w = (v - gamma_prev * self.w1 - eps_prev2 * self.w2) / lam
        d = (w - phi_prev * self.d1 - rho_prev2 * self.d2) / mu
        self.w2, self.w1 = self.w1, w
        self.d2, self.d1 = self.d1, d
        return w, d


def x_update(x: np.ndarray, zeta: float, d: np.ndarray) -> np.ndarray:
    """``x_k = x_{k-1} + zeta_k d_k`` as a new array."""
    return x + zeta * d


@dataclass
class UlqCarry:
    """LQ factorization of ``U_k``.

    ``psi_bar`` is the trailing diagonal, ``psi_bb`` the one before it and
    ``psi`` the last finalized diagonal; likewise for ``theta``.
    """

    psi_bar: float = 0.0
    psi_bb: float = 0.0
    psi: float = 0.0
    theta_bar: float = 0.0
    theta: float = 0.0
    omega: float = 0.0
    delta: float = 0.0
    eta: float = 0.0
    ca: float = 1.0  # reflection zeroing rho_{k-2}
    sa: float = 0.0
    cb: float = 1.0  # reflection zeroing delta_k
    sb: float = 0.0


@dataclass
class ResidualCarry:
    """Tails of ``Q_k^T beta_1 e_1``, of ``p_{k+1}`` and of ``t_k``."""

    chi_bar: float
    chi: float = 0.0
    pi_bb: float = 0.0
    pi_bar: float = 0.0
    pi_done: float = 0.0  # pi_{k-2}, final
    upsilon: float = 0.0
    tau_bb: float = 0.0
    tau_bar: float = 0.0
    tau_done: float = 0.0  # tau_{k-2}, final
    xi: float = 0.0
    xi_prev: float = 0.0


def residual_norm_update(rc: ResidualCarry, uc: UlqCarry, k: int, c: float, s: float,
                         mu: float, phi: float, rho: float, zeta: float) -> float:
    """Advance the ``||r_k||`` recurrences with column ``k`` of ``U_k``.

    ``c, s`` is the k-th reflection of the QR of ``T``; ``mu, phi, rho`` are
    ``mu_k, phi_{k-1}, rho_{k-2}``.  Returns the estimate of ``||r_k||``.
    """
    rc.chi = c * rc.chi_bar
    rc.chi_bar = s * rc.chi_bar
    if k == 1:
        uc.psi_bar = mu
        rc.pi_bb, rc.pi_bar = 0.0, rc.chi
        rc.xi = zeta
        rc.tau_bb = 0.0
        rc.tau_bar = _div(rc.xi, uc.psi_bar)
    elif k == 2:
        uc.cb, uc.sb, uc.psi_bb = sym_ortho(uc.psi_bar, phi)
        uc.delta, uc.eta = phi, mu
        uc.theta_bar = uc.sb * mu
        uc.psi_bar = -uc.cb * mu
        rc.upsilon = rc.chi
        rc.pi_bb, rc.pi_bar = (uc.cb * rc.pi_bar + uc.sb * rc.upsilon,
                               uc.sb * rc.pi_bar - uc.cb * rc.upsilon)
        rc.xi_prev, rc.xi = rc.xi, zeta
        rc.tau_bb = _div(rc.xi_prev, uc.psi_bb)
        rc.tau_bar = _div(rc.xi - uc.theta_bar * rc.tau_bb, uc.psi_bar)
    else:
        psi_bb_old, theta_bar_old = uc.psi_bb, uc.theta_bar
        uc.ca, uc.sa, uc.psi = sym_ortho(psi_bb_old, rho)
        uc.theta = uc.ca * theta_bar_old + uc.sa * phi
        uc.delta = uc.sa * theta_bar_old - uc.ca * phi
        uc.omega = uc.sa * mu
        uc.eta = -uc.ca * mu
        uc.cb, uc.sb, uc.psi_bb = sym_ortho(uc.psi_bar, uc.delta)
        uc.theta_bar = uc.sb * uc.eta
        uc.psi_bar = -uc.cb * uc.eta

        rc.pi_done = uc.ca * rc.pi_bb + uc.sa * rc.chi
        rc.upsilon = uc.sa * rc.pi_bb - uc.ca * rc.chi
        rc.pi_bb, rc.pi_bar = (uc.cb * rc.pi_bar + uc.sb * rc.upsilon,
                               uc.sb * rc.pi_bar - uc.cb * rc.upsilon)

        rc.tau_done = _div(rc.tau_bb * psi_bb_old, uc.psi)
        rc.xi_prev, rc.xi = rc.xi, zeta - uc.omega * rc.tau_done
        rc.tau_bb = _div(rc.xi_prev - uc.theta * rc.tau_done, uc.psi_bb)
        rc.tau_bar = _div(rc.xi - uc.theta_bar * rc.tau_bb, uc.psi_bar)
    return math.sqrt((rc.pi_bb - rc.tau_bb) ** 2 + (rc.pi_bar - rc.tau_bar) ** 2 + rc.chi_bar ** 2)


def _div(a, b):
    if b == 0.0:
        raise NumericalBreakdown("zero diagonal in the LQ factor of U")
    return a / b


def minares_solve(op: SymmetricOperator, b, criteria: StoppingCriteria | None = None, **kwargs):
    """Solve ``A x = b`` (or ``min ||A(b - A x)||``) for symmetric ``A``.

    Parameters
    ----------
    op
        Symmetric operator, possibly singular or indefinite.
    b
        Right-hand side of length ``op.n``.
    criteria
        Stopping rules; keyword arguments build one when omitted.

    Returns
    -------
    x, report
        The final iterate and a :class:`SolveReport`.  When the Lanczos
        process breaks down on a consistent system, ``x`` is the
        minimum-length solution; on an inconsistent one, ``x`` is the last
        iterate before breakdown, for which ``A r = 0``.
    """
    crit = criteria if criteria is not None else StoppingCriteria(**kwargs)
    b = np.asarray(b, dtype=op.dtype)
    n = op.n
    x = np.zeros(n, dtype=op.dtype)
    rep = SolveReport("minares")
    rec = _Recorder(rep, crit)

    beta1 = float(np.linalg.norm(b))
    if beta1 == 0.0:
        rep.status, rep.rnorm, rep.arnorm = Status.ZERO_RHS, 0.0, 0.0
        rec.record(x, 0.0, 0.0, 0, (0.0, 0.0) if crit.explicit_norms else None)
        return x, rep

    state = lanczos_init(op, b)
    alpha1, beta2, _ = lanczos_step(state, op, crit.beta_tol)
    matvecs = 1
    ell = None
    if state.finished:
        beta2, ell = 0.0, 1

    tqr = TQrCarry(lambda_bar=alpha1, gamma_bar=beta2)
    nqr = NQrCarry()
    zc = ZCarry(beta1 * alpha1, beta1 * beta2)
    uc = UlqCarry()
    rc = ResidualCarry(chi_bar=beta1)
    dirs = Directions(n, op.dtype)

    rnorm, arnorm = beta1, zc.ar_norm
    tol_r, tol_ar = thresholds(crit, beta1, arnorm)
    kmax = crit.max_iterations(n)

    def measure():
        if crit.explicit_norms:
            rep.extra_matvecs += 2
            return explicit_norms(op, b, x)
        return None

    expl = measure()
    rec.record(x, rnorm, arnorm, matvecs, expl)

    beta_k1 = beta2                     # beta_{k+1}
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
        if final:
            tol = crit.beta_tol if crit.beta_tol is not None else default_beta_tol(state.anorm, op.dtype)
            if abs(tqr.lam) <= tol:
                # singular T_ell: b is not in range(A), keep x_{ell-1}
                status = Status.BREAKDOWN_INCONSISTENT
                break
        k += 1
        lam, gamma, eps = tqr.lam, tqr.gamma, tqr.eps
        mu, phi, rho = nqr.step(lam, gamma, eps, final=final)
        zeta = zc.step(nqr.c1, nqr.s1, nqr.c2, nqr.s2)
        try:
            dirs.step(v_k, lam, gamma_prev, eps_prev2, mu, phi, rho)
            x = x_update(x, zeta, dirs.d1)
            rnorm = residual_norm_update(rc, uc, k, tqr.c, tqr.s, mu, phi, rho, zeta)
        except NumericalBreakdown:
            status = Status.NUMERICAL_FAILURE
            break
        arnorm = zc.ar_norm
        if crit.trace:
            rep.trace.append(dict(
                k=k, alpha=alpha_next, beta=beta_next2, lam=lam, gamma=gamma, eps=eps,
                c=tqr.c, s=tqr.s, mu=mu, phi=phi, rho=rho, zeta=zeta,
                c1=nqr.c1, s1=nqr.s1, c2=nqr.c2, s2=nqr.s2,
                pi=rc.pi_done, tau=rc.tau_done, chi=rc.chi, chi_bar=rc.chi_bar,
                rnorm=rnorm, arnorm=arnorm))
        if not all(map(math.isfinite, (lam, mu, zeta, rnorm, arnorm))):
            status = Status.NUMERICAL_FAILURE
            break
        expl = measure()
        rec.record(x, rnorm, arnorm, matvecs, expl)

        gamma_prev, eps_prev2, eps_prev = gamma, eps_prev, eps
        beta_k1 = beta_next2
        if final:
            status = Status.BREAKDOWN_CONSISTENT
            break

    r_fin, ar_fin = expl if expl is not None else (rnorm, arnorm)
    if status is not Status.NUMERICAL_FAILURE:
        status = final_status(r_fin, ar_fin, tol_r, tol_ar, status or Status.MAX_ITERATIONS)
    rep.status = status
    rep.iterations = k
    rep.matvecs = matvecs
    rep.rnorm, rep.arnorm = rnorm, arnorm
    rep.ell = ell
    return x, rep
