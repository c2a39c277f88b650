"""Symmetric Lanczos process as a resumable three-term recurrence.

One call to :func:`lanczos_step` costs exactly one operator application and
emits ``(alpha_k, beta_{k+1})``.  No reorthogonalization is performed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, DimensionError, ZeroRHSError
from .operator import SymmetricOperator

__all__ = ["LanczosState", "lanczos_init", "lanczos_step", "default_beta_tol"]


@dataclass
class LanczosState:
    """Rolling window ``(v_{k-1}, v_k, beta_k)`` of the Lanczos process.

    ``k`` counts completed steps.  Once ``finished`` is set, ``ell`` holds the
    index of the step whose ``beta_{k+1}`` fell below the breakdown tolerance
    and ``v_cur`` is left at ``v_ell``.
    """

    k: int
    v_prev: np.ndarray
    v_cur: np.ndarray
    beta_cur: float
    beta1: float
    finished: bool = False
    ell: int | None = None
    # running max of ||T e_k||, a lower bound on ||A||
    anorm: float = field(default=0.0)


def default_beta_tol(anorm: float, dtype=np.float64) -> float:
    """Breakdown threshold ``sqrt(eps) * ||T||`` used when none is given."""
    return math.sqrt(np.finfo(dtype).eps) * anorm


def lanczos_init(op: SymmetricOperator, b) -> LanczosState:
    b = np.asarray(b, dtype=op.dtype)
    if b.shape != (op.n,):
        raise DimensionError(f"expected rhs of length {op.n}, got shape {b.shape}")
    beta1 = float(np.linalg.norm(b))
    if beta1 == 0.0:
        raise ZeroRHSError("b = 0")
    return LanczosState(k=0, v_prev=np.zeros_like(b), v_cur=b / beta1, beta_cur=0.0, beta1=beta1)


def lanczos_step(state: LanczosState, op: SymmetricOperator, beta_tol: float | None = None):
    """Advance the process by one step.

    Returns ``(alpha_k, beta_{k+1}, state)``.  The state is updated in place;
    fresh arrays are allocated for ``v_{k+1}`` so callers may keep references
    to earlier basis vectors.  When ``beta_{k+1} <= beta_tol`` the state is
    marked finished and the vectors are not advanced.
    """
    if state.finished:
        raise ContractViolation("Lanczos process already terminated at step %d" % state.ell)
    q = op.apply(state.v_cur)
    if state.k > 0:
        q = q - state.beta_cur * state.v_prev
    alpha = float(np.dot(state.v_cur, q))
    q = q - alpha * state.v_cur
    beta_next = float(np.linalg.norm(q))
    state.k += 1
    state.anorm = max(state.anorm, math.sqrt(alpha * alpha + state.beta_cur ** 2 + beta_next ** 2))
    tol = default_beta_tol(state.anorm, op.dtype) if beta_tol is None else beta_tol
    if beta_next <= tol:
        state.finished = True
        state.ell = state.k
    else:
        state.v_prev = state.v_cur
        state.v_cur = q / beta_next
        state.beta_cur = beta_next
    return alpha, beta_next, state
