import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

import oracles
from minares import (CountingOperator, Status, car_solve, cg_solve, cr_solve, diagonal, from_dense,
                     identity, minares_solve, minres_solve)

SOLVERS = [cg_solve, cr_solve, car_solve]


@pytest.mark.parametrize("solve", SOLVERS)
def test_identity_one_step(solve, rng):
    b = rng.standard_normal(4)
    x, rep = solve(identity(4), b)
    assert_allclose(x, b, rtol=1e-15)
    assert rep.iterations == 1 and rep.status.ok


@pytest.mark.parametrize("solve", SOLVERS)
def test_diag12(solve):
    x, rep = solve(diagonal([1.0, 2.0]), np.ones(2), eps_r=1e-14, eps_Ar=1e-14)
    assert_allclose(x, [1.0, 0.5], rtol=1e-14)
    assert rep.iterations == 2


@pytest.mark.parametrize("solve", SOLVERS)
def test_zero_rhs(solve):
    x, rep = solve(identity(2), np.zeros(2))
    assert rep.status == Status.ZERO_RHS and rep.matvecs == 0
    assert_array_equal(x, 0.0)


@pytest.mark.parametrize("solve", SOLVERS)
def test_indefinite_detected(solve):
    _, rep = solve(diagonal([1.0, -1.0]), np.array([1.0, 1.0]))
    assert rep.status == Status.INDEFINITE
    assert not rep.converged


@pytest.mark.parametrize("solve,setup", [(cg_solve, 1), (cr_solve, 1), (car_solve, 2)])
def test_matvec_counts(rng, solve, setup):
    op = CountingOperator(from_dense(oracles.spd(20, rng)))
    _, rep = solve(op, rng.standard_normal(20), k_max=7)
    assert rep.iterations == 7
    assert rep.matvecs == op.count == setup + 7


def test_cg_minimizes_a_norm_error(rng):
    A = oracles.spd(25, rng)
    b = rng.standard_normal(25)
    _, rep = cg_solve(from_dense(A), b, eps_r=0, eps_Ar=0, k_max=10, record_iterates=True)
    for k in range(1, 11):
        assert np.linalg.norm(rep.iterates[k] - oracles.min_a_error(A, b, k)) <= 1e-8


def test_cg_reports_no_ar_estimate(rng):
    _, rep = cg_solve(from_dense(oracles.spd(5, rng)), rng.standard_normal(5))
    assert np.isnan(rep.arnorm)
    assert all(np.isnan(rep.arnorm_history))


def test_cr_residuals_match_minres(rng):
    A = oracles.spd(25, rng)
    b = rng.standard_normal(25)
    _, rc = cr_solve(from_dense(A), b, eps_r=0, eps_Ar=0, k_max=12)
    _, rm = minres_solve(from_dense(A), b, eps_r=0, eps_Ar=0, k_max=12)
    assert_allclose(rc.rnorm_history, rm.rnorm_history, rtol=1e-8)
    for k in range(1, 13):
        assert abs(rc.rnorm_history[k] - oracles.min_r(A, b, k)[0]) <= 1e-8


def test_car_vectors_are_consistent_products(rng):
    A = oracles.spd(15, rng)
    b = rng.standard_normal(15)
    _, rep = car_solve(from_dense(A), b, eps_r=0, eps_Ar=0, k_max=8, trace=True)
    for t in rep.trace:
        for got, want in ((t["r"], b - A @ t["x"]), (t["s"], A @ t["r"]), (t["q"], A @ t["p"]),
                          (t["t"], A @ t["s"]), (t["u"], A @ t["q"])):
            assert np.linalg.norm(got - want) <= 1e-10 * (1 + np.linalg.norm(want))


def test_car_matches_minares_iterates(rng):
    A = oracles.spd(25, rng)
    b = rng.standard_normal(25)
    _, rc = car_solve(from_dense(A), b, eps_r=0, eps_Ar=0, k_max=12, record_iterates=True)
    _, rm = minares_solve(from_dense(A), b, eps_r=0, eps_Ar=0, k_max=12, record_iterates=True)
    for xc, xm in zip(rc.iterates[1:], rm.iterates[1:]):
        assert np.linalg.norm(xc - xm) <= 1e-8 * np.linalg.norm(xm)
    assert_allclose(rc.arnorm_history, rm.arnorm_history, rtol=1e-6)


def test_car_ar_monotone(rng):
    _, rep = car_solve(from_dense(oracles.spd(30, rng)), rng.standard_normal(30))
    h = rep.arnorm_history
    assert all(b <= a * (1 + 1e-12) for a, b in zip(h, h[1:]))


def test_explicit_norms_extra_matvecs(rng):
    op = CountingOperator(from_dense(oracles.spd(10, rng)))
    _, rep = cr_solve(op, rng.standard_normal(10), explicit_norms=True)
    assert op.count == rep.matvecs + rep.extra_matvecs
    assert rep.extra_matvecs == 2 * (rep.iterations + 1)


def test_trace_closes_with_final_state(rng):
    _, rep = car_solve(from_dense(oracles.spd(8, rng)), rng.standard_normal(8), trace=True)
    assert len(rep.trace) == rep.iterations + 1
    assert rep.trace[-1]["alpha"] is None
    assert all(t["alpha"] > 0 and t["beta"] >= 0 for t in rep.trace[:-1])
