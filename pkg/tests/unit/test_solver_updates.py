"""
Tests for the per-mode updates, truncation and starting points.
"""

import numpy as np
import pytest

from modules.solver import (
    FactorSet,
    InitStrategy,
    SolverConfig,
    UpdateCase,
    apd_mode_update,
    init_factors,
    kkt_mode_residuals,
    lambda_of,
    mode_matrices,
    objective_f,
    random_factors,
    revised_mode_update,
    truncate,
)
from modules.tensor_core import DenseTensor, assemble
from shared.core.exceptions import ConfigurationException, DimensionMismatchError, InitializationError


def _rank_one(n: int, value: float = 3.0) -> DenseTensor:
    e1 = np.eye(n)[:, :1]
    return assemble([e1, e1, e1], [value])


def _params(A: DenseTensor, r: int, **overrides):
    return SolverConfig(**overrides).resolve(norm_sq=float(np.sum(A.array ** 2)), f0=9.0, r=r)


class TestObjective:
    def test_lambda_and_f_at_truth(self, odeco_321):
        A, truth = odeco_321
        np.testing.assert_allclose(lambda_of(A, truth.factors), [3.0, 2.0, 1.0], atol=1e-12)
        assert objective_f(A, truth.factors) == pytest.approx(14.0)

    def test_mode_matrices_lambda_matches(self, odeco_321):
        A, truth = odeco_321
        for i in range(3):
            mm = mode_matrices(A, list(truth.factors), i)
            np.testing.assert_allclose(mm.lam, [3.0, 2.0, 1.0], atol=1e-12)
            np.testing.assert_allclose(mm.weighted, mm.V @ mm.Lambda, atol=1e-14)

    def test_kkt_residuals_vanish_at_truth(self, odeco_321):
        A, truth = odeco_321
        assert np.max(kkt_mode_residuals(A, truth.factors)) < 1e-12


class TestModeUpdates:
    def test_polar_step_keeps_exact_factors(self, odeco_321):
        A, truth = odeco_321
        params = _params(A, 3)
        update = apd_mode_update(A, list(truth.factors), 0, params)
        assert update.case is UpdateCase.POLAR
        np.testing.assert_allclose(update.factor, truth.factors[0], atol=1e-12)
        np.testing.assert_allclose(update.sigma, [9.0, 4.0, 1.0], atol=1e-12)

    def test_classic_correction_on_vanishing_lambda(self):
        A = _rank_one(4)
        state = [np.eye(4)[:, :2] for _ in range(3)]
        update = apd_mode_update(A, state, 0, _params(A, 2))
        assert update.case is UpdateCase.PROXIMAL
        assert update.proximal
        np.testing.assert_allclose(update.factor, np.eye(4)[:, :2], atol=1e-12)
        np.testing.assert_allclose(update.lam_before, [3.0, 0.0], atol=1e-14)

    def test_plain_mode_skips_correction(self):
        A = _rank_one(4)
        state = [np.eye(4)[:, :2] for _ in range(3)]
        update = apd_mode_update(A, state, 0, _params(A, 2, proximal_mode="none"))
        assert update.case is UpdateCase.POLAR
        np.testing.assert_allclose(update.factor.T @ update.factor, np.eye(2), atol=1e-12)

    def test_revised_flip_when_square(self):
        A = _rank_one(2)
        state = [np.eye(2) for _ in range(3)]
        update = revised_mode_update(A, state, 0, _params(A, 2, proximal_mode="revised"))
        assert update.case is UpdateCase.REVISED_FLIP
        np.testing.assert_allclose(update.factor, np.eye(2), atol=1e-12)
        assert update.symmetry_defect < 1e-12

    def test_revised_flip_follows_previous_factor_sign(self):
        A = _rank_one(2)
        params = _params(A, 2, proximal_mode="revised")
        others = [np.eye(2), np.eye(2)]
        plain = revised_mode_update(A, [np.eye(2), *others], 0, params)
        negated = revised_mode_update(A, [np.diag([1.0, -1.0]), *others], 0, params)
        assert negated.case is UpdateCase.REVISED_FLIP
        np.testing.assert_allclose(negated.factor[:, 0], plain.factor[:, 0], atol=1e-12)
        np.testing.assert_allclose(negated.factor[:, 1], -plain.factor[:, 1], atol=1e-12)
        np.testing.assert_allclose(negated.factor, np.diag([1.0, -1.0]), atol=1e-12)

    def test_revised_falls_back_when_not_square(self):
        A = _rank_one(4)
        state = [np.eye(4)[:, :2] for _ in range(3)]
        update = revised_mode_update(A, state, 0, _params(A, 2, proximal_mode="revised"))
        assert update.case is UpdateCase.PROXIMAL

    def test_revised_needs_tau(self):
        A = _rank_one(2)
        params = _params(A, 2)
        with pytest.raises(ConfigurationException):
            revised_mode_update(A, [np.eye(2)] * 3, 0, params)


class TestTruncate:
    def setup_method(self):
        self.U = FactorSet.of([np.eye(3)] * 3)

    def test_removes_small_columns(self):
        reduced, removed = truncate(self.U, np.array([3.0, 0.1, -0.2]), kappa=0.5)
        assert removed == (1, 2)
        assert reduced.rank == 1
        np.testing.assert_array_equal(reduced[0], np.eye(3)[:, :1])

    def test_keeps_largest_column(self):
        reduced, removed = truncate(self.U, np.array([0.1, -0.3, 0.2]), kappa=1.0)
        assert removed == (0, 2)
        np.testing.assert_array_equal(reduced[1], np.eye(3)[:, 1:2])

    def test_nothing_to_remove(self):
        reduced, removed = truncate(self.U, np.array([3.0, 2.0, 1.0]), kappa=0.5)
        assert removed == ()
        assert reduced is self.U


class TestInitialization:
    def test_zero_tensor_rejected(self):
        with pytest.raises(InitializationError):
            init_factors(DenseTensor.zeros((3, 3, 3)), 2)

    def test_rank_out_of_range(self, gaussian_444):
        with pytest.raises(DimensionMismatchError):
            init_factors(gaussian_444, 5)
        with pytest.raises(DimensionMismatchError):
            init_factors(gaussian_444, 0)

    def test_hosvd_start_has_positive_objective(self, odeco_321):
        A, _ = odeco_321
        U = init_factors(A, 2)
        assert U.rank == 2
        assert objective_f(A, U) > 0

    def test_random_start_is_seeded(self, gaussian_444):
        a = init_factors(gaussian_444, 2, InitStrategy.RANDOM, seed=4)
        b = random_factors(gaussian_444, 2, seed=4)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)

    def test_random_start_streams_are_independent(self, gaussian_444):
        base = random_factors(gaussian_444, 2, seed=4, stream=(7, 0, 0))
        again = init_factors(gaussian_444, 2, InitStrategy.RANDOM, seed=4, stream=(7, 0, 0))
        other_repeat = random_factors(gaussian_444, 2, seed=4, stream=(7, 1, 0))
        other_mode = random_factors(gaussian_444, 2, seed=4, stream=(7, 0, 1))
        np.testing.assert_array_equal(base[0], again[0])
        assert not np.array_equal(base[0], other_repeat[0])
        assert not np.array_equal(base[0], other_mode[0])
        assert not np.array_equal(base[0], random_factors(gaussian_444, 2, seed=4)[0])

    def test_hosvd_falls_back_when_start_is_degenerate(self):
        # leading singular vector of every unfolding is e1, but A[0, 0, 0] = 0
        arr = np.zeros((2, 2, 2))
        arr[0, 0, 1] = arr[0, 1, 0] = arr[1, 0, 0] = 2.0
        A = DenseTensor(arr)
        U = init_factors(A, 1)
        assert objective_f(A, U) > 0


class TestFactorSet:
    def test_rejects_mixed_ranks(self):
        with pytest.raises(DimensionMismatchError):
            FactorSet.of([np.eye(3)[:, :2], np.eye(3)[:, :1]])

    def test_select_and_distance(self):
        U = FactorSet.of([np.eye(3)] * 3)
        swapped = U.select_columns([1, 0, 2])
        assert U.distance(U) == 0.0
        assert U.distance(swapped) == pytest.approx(np.sqrt(3 * 4.0))
