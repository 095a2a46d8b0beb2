"""
Tests for the dense matrix kernels: SVD, polar, Stiefel projections and
principal angles.
"""

import numpy as np
import pytest
import scipy.linalg

from modules.matrix_kernels import (
    OrthonormalMatrix,
    complete_orthonormal,
    completion_bound_gap,
    nonzero_angles,
    normal_project,
    polar,
    polar_argmax_gap,
    polar_error_gap,
    principal_angles,
    psd_sqrt,
    random_orthonormal,
    skew,
    stiefel_defect,
    stiefel_distance_gap,
    svd,
    sym,
    tangent_project,
    trace_inequality_gap,
)
from shared.core.exceptions import DimensionMismatchError, NumericalError


class TestSvdAndPolar:
    def test_svd_reconstructs(self, rng):
        M = rng.standard_normal((5, 3))
        res = svd(M)
        np.testing.assert_allclose((res.G * res.sigma) @ res.H.T, M, atol=1e-12)
        assert np.all(np.diff(res.sigma) <= 0)
        assert res.numerical_rank() == 3
        assert res.sigma_min == pytest.approx(res.sigma[-1])

    def test_svd_numerical_rank_of_deficient_matrix(self, rng):
        u = rng.standard_normal((4, 1))
        assert svd(u @ rng.standard_normal((1, 3))).numerical_rank() == 1

    def test_svd_rejects_non_finite(self):
        with pytest.raises(NumericalError):
            svd(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_polar_factors(self, rng):
        M = rng.standard_normal((6, 3))
        factors = polar(M)
        U, H = factors.U.matrix, factors.H
        np.testing.assert_allclose(U @ H, M, atol=1e-12)
        assert stiefel_defect(U) < 1e-12
        np.testing.assert_allclose(H, H.T, atol=1e-14)
        assert np.min(np.linalg.eigvalsh(H)) > -1e-12

    def test_polar_rejects_wide_matrix(self, rng):
        with pytest.raises(DimensionMismatchError):
            polar(rng.standard_normal((2, 3)))

    def test_polar_of_orthonormal_is_itself(self, rng):
        Q = random_orthonormal(5, 2, rng).matrix
        np.testing.assert_allclose(polar(Q).U.matrix, Q, atol=1e-12)

    def test_polar_maximizes_inner_product(self, rng):
        M = rng.standard_normal((5, 3))
        for _ in range(20):
            Q = random_orthonormal(5, 3, rng)
            assert polar_argmax_gap(M, Q) >= -1e-12

    def test_polar_error_reformulation(self, rng):
        for _ in range(20):
            B = rng.standard_normal((4, 5))
            C = rng.standard_normal((3, 5))
            Q = random_orthonormal(4, 3, rng).matrix
            gap = polar_error_gap(B, C, Q)
            assert gap.full_rank
            assert gap.equality_holds()
            assert gap.bound_holds()

    def test_polar_error_gap_rejects_shapes(self, rng):
        with pytest.raises(DimensionMismatchError):
            polar_error_gap(rng.standard_normal((2, 5)), rng.standard_normal((3, 5)), np.eye(3)[:2])

    def test_psd_sqrt(self, rng):
        X = rng.standard_normal((4, 4))
        H = X @ X.T
        R = psd_sqrt(H)
        np.testing.assert_allclose(R @ R, H, atol=1e-10)

    def test_psd_sqrt_rejects_indefinite(self):
        with pytest.raises(NumericalError):
            psd_sqrt(np.diag([1.0, -1.0]))


class TestStiefel:
    def test_orthonormal_matrix_validates(self):
        with pytest.raises(NumericalError):
            OrthonormalMatrix(np.ones((3, 2)))
        with pytest.raises(DimensionMismatchError):
            OrthonormalMatrix(np.eye(3)[:2])

    def test_random_orthonormal_is_seeded(self):
        a = random_orthonormal(6, 3, 5).matrix
        b = random_orthonormal(6, 3, 5).matrix
        np.testing.assert_array_equal(a, b)
        assert stiefel_defect(a) < 1e-12

    def test_random_orthonormal_rejects_rank(self):
        with pytest.raises(DimensionMismatchError):
            random_orthonormal(3, 4, 0)

    def test_skew_sym_split(self, rng):
        M = rng.standard_normal((4, 4))
        np.testing.assert_allclose(skew(M) + sym(M), M, atol=1e-15)
        np.testing.assert_allclose(skew(M), -skew(M).T)

    def test_projections_split_any_matrix(self, rng):
        A = random_orthonormal(6, 3, rng).matrix
        B = rng.standard_normal((6, 3))
        T = tangent_project(A, B)
        N = normal_project(A, B)
        np.testing.assert_allclose(T + N, B, atol=1e-12)
        np.testing.assert_allclose(sym(A.T @ T), 0.0, atol=1e-12)
        assert abs(float(np.sum(T * N))) < 1e-12

    def test_tangent_projection_is_idempotent(self, rng):
        A = random_orthonormal(5, 2, rng).matrix
        T = tangent_project(A, rng.standard_normal((5, 2)))
        np.testing.assert_allclose(tangent_project(A, T), T, atol=1e-12)

    def test_complete_orthonormal(self, rng):
        U = random_orthonormal(5, 2, rng).matrix
        W = complete_orthonormal(U).matrix
        P = np.hstack([U, W])
        np.testing.assert_allclose(P.T @ P, np.eye(5), atol=1e-12)

    def test_complete_orthonormal_of_square_is_empty(self):
        assert complete_orthonormal(np.eye(3)).cols == 0


class TestAngles:
    def test_principal_angles_match_scipy(self, rng):
        U = random_orthonormal(7, 3, rng).matrix
        V = random_orthonormal(7, 3, rng).matrix
        ours = principal_angles(U, V)
        theirs = np.sort(scipy.linalg.subspace_angles(U, V))
        np.testing.assert_allclose(ours, theirs, atol=1e-8)

    def test_principal_angles_of_same_span_vanish(self, rng):
        U = random_orthonormal(5, 2, rng).matrix
        rotation = random_orthonormal(2, 2, rng).matrix
        assert np.max(principal_angles(U, U @ rotation)) < 1e-7

    def test_nonzero_angles(self):
        np.testing.assert_array_equal(nonzero_angles([0.3, 1e-9, 0.1]), [0.1, 0.3])

    def test_pair_inequalities(self, rng):
        for _ in range(20):
            U = random_orthonormal(6, 3, rng).matrix
            V = random_orthonormal(6, 3, rng).matrix
            assert trace_inequality_gap(U, V) >= -1e-12
            assert stiefel_distance_gap(U, V) >= -1e-12
            full = random_orthonormal(6, 6, rng).matrix
            assert completion_bound_gap(U, full) >= -1e-10

    def test_completion_bound_rejects_non_square_reference(self, rng):
        U = random_orthonormal(4, 2, rng).matrix
        with pytest.raises(DimensionMismatchError):
            completion_bound_gap(U, U)
