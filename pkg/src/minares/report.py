"""Stopping criteria and solve reports shared by every solver."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = ["Status", "StoppingCriteria", "SolveReport"]


class Status(str, Enum):
    CONVERGED_R = "converged_r"
    CONVERGED_AR = "converged_Ar"
    BREAKDOWN_CONSISTENT = "breakdown_consistent"
    BREAKDOWN_INCONSISTENT = "breakdown_inconsistent"
    MAX_ITERATIONS = "max_iterations"
    ZERO_RHS = "zero_rhs"
    INDEFINITE = "indefinite"
    NUMERICAL_FAILURE = "numerical_failure"

    def __str__(self):
        return self.value

    @property
    def ok(self) -> bool:
        return self in _SUCCESS


_SUCCESS = {Status.CONVERGED_R, Status.CONVERGED_AR, Status.BREAKDOWN_CONSISTENT,
            Status.BREAKDOWN_INCONSISTENT, Status.ZERO_RHS}


@dataclass
class StoppingCriteria:
    """When to stop, and what to record on the way.

    A solve stops as soon as ``||r_k|| <= eps_r + rel_r*||b||`` or
    ``||A r_k|| <= eps_Ar + rel_Ar*||A b||`` or ``k_max`` iterations ran.
    ``k_max=None`` means ``10 n``.  ``beta_tol=None`` selects a Lanczos
    breakdown threshold relative to the running estimate of ``||A||``.

    ``explicit_norms`` recomputes ``b - A x_k`` and ``A(b - A x_k)`` with two
    extra products per iteration; those products are reported separately
    and the explicit values drive the stopping test.
    """

    eps_r: float = 1e-10
    eps_Ar: float = 1e-10
    rel_r: float = 0.0
    rel_Ar: float = 0.0
    k_max: int | None = None
    beta_tol: float | None = None
    record_history: bool = True
    explicit_norms: bool = False
    record_iterates: bool = False
    trace: bool = False

    def __post_init__(self):
        for name in ("eps_r", "eps_Ar", "rel_r", "rel_Ar"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0")
        if self.k_max is not None and self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.beta_tol is not None and not self.beta_tol >= 0:
            raise ValueError("beta_tol must be >= 0")

    def max_iterations(self, n: int) -> int:
        return 10 * n if self.k_max is None else self.k_max


@dataclass
class SolveReport:
    solver: str
    status: Status = Status.MAX_ITERATIONS
    iterations: int = 0
    matvecs: int = 0
    # products spent on explicit norm evaluation, not part of the method
    extra_matvecs: int = 0
    rnorm: float = float("nan")
    arnorm: float = float("nan")
    ell: int | None = None
    rnorm_history: list = field(default_factory=list)
    arnorm_history: list = field(default_factory=list)
    rnorm_explicit_history: list = field(default_factory=list)
    arnorm_explicit_history: list = field(default_factory=list)
    matvec_history: list = field(default_factory=list)
    time_history: list = field(default_factory=list)
    iterates: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status.ok

    def __str__(self):
        return (f"{self.solver}: {self.status} after {self.iterations} iterations, "
                f"{self.matvecs} matvecs, ||r||={self.rnorm:.3e}, ||Ar||={self.arnorm:.3e}")


class _Recorder:
    """Appends per-iteration data to a report according to the criteria."""

    def __init__(self, report: SolveReport, criteria: StoppingCriteria):
        self.report = report
        self.criteria = criteria
        self.t0 = time.perf_counter()

    def record(self, x, rnorm, arnorm, matvecs, explicit=None):
        rep, crit = self.report, self.criteria
        if crit.record_history:
            rep.rnorm_history.append(rnorm)
            rep.arnorm_history.append(arnorm)
            rep.matvec_history.append(matvecs)
            rep.time_history.append(time.perf_counter() - self.t0)
            if explicit is not None:
                rep.rnorm_explicit_history.append(explicit[0])
                rep.arnorm_explicit_history.append(explicit[1])
        if crit.record_iterates:
            rep.iterates.append(np.array(x, copy=True))


def explicit_norms(op, b, x):
    """``(||b - A x||, ||A(b - A x)||)`` by two operator products."""
    r = b - op.apply(x)
    return float(np.linalg.norm(r)), float(np.linalg.norm(op.apply(r)))


def thresholds(criteria: StoppingCriteria, bnorm: float, abnorm: float):
    return (criteria.eps_r + criteria.rel_r * bnorm,
            criteria.eps_Ar + criteria.rel_Ar * abnorm)


def final_status(rnorm, arnorm, tol_r, tol_ar, fallback: Status) -> Status:
    if rnorm <= tol_r:
        return Status.CONVERGED_R
    if arnorm <= tol_ar:
        return Status.CONVERGED_AR
    return fallback
