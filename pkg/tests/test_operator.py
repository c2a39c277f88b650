import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

import oracles
from minares import (CountingOperator, DegenerateInputError, DimensionError, SparseSymmetric,
                     SymmetricOperator, augmented, diagonal, from_dense, from_sparse, identity,
                     max_entry_scale, shifted)
from minares.operator import symmetry_defect


class TestApply:
    def test_identity(self):
        assert_array_equal(identity(3).apply([1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])

    def test_diagonal(self):
        assert_array_equal(diagonal([1.0, 2.0, 3.0]).apply(np.ones(3)), [1.0, 2.0, 3.0])

    def test_single_offdiagonal_entry_is_mirrored(self):
        op = from_sparse(SparseSymmetric(2, [1], [2], [5.0]))
        assert_array_equal(op.apply([1.0, 0.0]), [0.0, 5.0])
        assert_array_equal(op.apply([0.0, 1.0]), [5.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            identity(3).apply(np.ones(4))
        with pytest.raises(DimensionError):
            identity(3).apply(np.ones((3, 1)))

    def test_deterministic(self, rng):
        op = from_dense(oracles.spd(12, rng))
        v = rng.standard_normal(12)
        assert_array_equal(op.apply(v), op.apply(v))

    def test_matmul_and_call_alias_apply(self):
        op = diagonal([2.0, 3.0])
        assert_array_equal(op @ np.ones(2), op(np.ones(2)))

    def test_counting_operator(self):
        op = CountingOperator(identity(2))
        for _ in range(3):
            op.apply(np.ones(2))
        assert op.count == 3

    def test_float32(self):
        op = diagonal([1.0, 2.0], dtype=np.float32)
        assert op.apply(np.ones(2)).dtype == np.float32

    def test_from_dense_rejects_nonsymmetric(self):
        with pytest.raises(ValueError):
            from_dense([[1.0, 2.0], [0.0, 1.0]])

    def test_to_dense(self, rng):
        A = oracles.spd(6, rng)
        assert_allclose(from_dense(A).to_dense(), A, rtol=0, atol=1e-15)

    def test_bad_dimension(self):
        with pytest.raises(ValueError):
            SymmetricOperator(0, lambda v: v)


class TestShifted:
    def test_identity_minus_one_is_zero(self, rng):
        assert_array_equal(shifted(identity(4), 1.0).apply(rng.standard_normal(4)), np.zeros(4))

    def test_diag_shift(self):
        assert_array_equal(shifted(diagonal([1.0, 2.0]), 2.0).apply([1.0, 1.0]), [-1.0, 0.0])

    def test_zero_shift_is_bitwise_identical(self, rng):
        op = from_dense(oracles.indefinite(9, rng))
        v = rng.standard_normal(9)
        assert_array_equal(shifted(op, 0.0).apply(v), op.apply(v))


class TestAugmented:
    def test_scalar(self):
        assert_array_equal(augmented(np.array([[1.0]])).apply([1.0, 0.0]), [0.0, 1.0])

    def test_identity_block(self):
        assert_array_equal(augmented(np.eye(2)).apply([1.0, 0.0, 0.0, 1.0]), [0.0, 1.0, 1.0, 0.0])

    def test_matches_dense_block_matrix(self, rng):
        B = rng.standard_normal((3, 2))
        M = np.block([[np.zeros((3, 3)), B], [B.T, np.zeros((2, 2))]])
        op = augmented(B)
        u, v = rng.standard_normal(5), rng.standard_normal(5)
        assert_allclose(op.apply(u), M @ u, rtol=0, atol=1e-14)
        assert symmetry_defect(op, u, v) <= 1e-14

    @pytest.mark.parametrize("m,p", [(1, 1), (2, 5), (5, 3), (4, 4)])
    def test_square_is_block_diagonal_gram(self, rng, m, p):
        B = rng.standard_normal((m, p))
        op = augmented(B)
        G = np.block([[B @ B.T, np.zeros((m, p))], [np.zeros((p, m)), B.T @ B]])
        w = rng.standard_normal(m + p)
        assert_allclose(op.apply(op.apply(w)), G @ w, rtol=1e-13, atol=1e-13)

    def test_sparse_input(self, rng):
        B = rng.standard_normal((4, 3))
        w = rng.standard_normal(7)
        assert_allclose(augmented(sp.csr_matrix(B)).apply(w), augmented(B).apply(w), atol=1e-15)

    def test_empty_rejected(self):
        with pytest.raises(DegenerateInputError):
            augmented(np.zeros((0, 3)))


class TestSparseSymmetric:
    def test_upper_entries_are_canonicalized_and_summed(self):
        M = SparseSymmetric(3, [1, 2, 1], [2, 1, 1], [1.0, 2.0, 4.0])
        assert M.nnz == 2
        assert_array_equal(M.to_dense(), [[4.0, 3.0, 0.0], [3.0, 0.0, 0.0], [0.0, 0.0, 0.0]])

    def test_expansion_exactly_symmetric(self, rng):
        A = rng.standard_normal((7, 7))
        M = SparseSymmetric.from_dense(A + A.T)
        D = M.to_dense()
        assert_array_equal(D, D.T)

    def test_index_range(self):
        with pytest.raises(ValueError):
            SparseSymmetric(2, [0], [1], [1.0])
        with pytest.raises(ValueError):
            SparseSymmetric(2, [3], [1], [1.0])

    def test_immutable(self):
        M = SparseSymmetric(2, [1], [1], [1.0])
        with pytest.raises(ValueError):
            M.vals[0] = 2.0


class TestMaxEntryScale:
    def test_example(self):
        M = SparseSymmetric(3, [1, 2, 3], [1, 2, 3], [4.0, -8.0, 2.0])
        S, alpha = max_entry_scale(M)
        assert alpha == 8.0
        assert_array_equal(S.vals, [0.5, -1.0, 0.25])

    def test_normalized_input_unchanged(self):
        M = SparseSymmetric(2, [1, 2], [1, 1], [1.0, -0.5])
        S, alpha = max_entry_scale(M)
        assert alpha == 1.0
        assert_array_equal(S.vals, M.vals)

    def test_all_zero(self):
        with pytest.raises(DegenerateInputError):
            max_entry_scale(SparseSymmetric(2, [1], [1], [0.0]))

    @given(st.lists(st.floats(-1e6, 1e6, allow_nan=False).filter(lambda t: abs(t) > 1e-300),
                    min_size=1, max_size=12))
    def test_idempotent_and_unit_max(self, values):
        n = len(values)
        M = SparseSymmetric(n, np.arange(1, n + 1), np.arange(1, n + 1), values)
        S, _ = max_entry_scale(M)
        assert S.max_abs() == 1.0
        S2, alpha2 = max_entry_scale(S)
        assert alpha2 == 1.0
        assert_array_equal(S2.vals, S.vals)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_symmetry_of_constructed_operators(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    A = A + A.T
    scale = np.max(np.abs(A))
    B = rng.standard_normal((n, max(1, n // 2)))
    ops = [(from_dense(A), scale), (from_sparse(SparseSymmetric.from_dense(A)), scale),
           (shifted(from_dense(A), 0.7), scale + 0.7), (augmented(B), np.max(np.abs(B)))]
    for op, s in ops:
        for _ in range(4):
            u, v = rng.standard_normal(op.n), rng.standard_normal(op.n)
            tol = 1e-12 * np.linalg.norm(u) * np.linalg.norm(v) * s
            assert symmetry_defect(op, u, v) <= tol
