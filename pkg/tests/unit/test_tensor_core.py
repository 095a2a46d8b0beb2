"""
Tests for dense tensors and multilinear operations.

Oracles are numpy.einsum and explicit loops.
"""

import itertools

import numpy as np
import pytest

from modules.tensor_core import (
    BlockVector,
    DenseTensor,
    assemble,
    contract_full,
    contract_mode,
    diag_tensor,
    extract_diag,
    fold,
    inner,
    mode_contractions,
    multilinear_multiply,
    norm,
    unfold,
)
from shared.core.exceptions import DimensionMismatchError


def _random_block(rng, dims):
    parts = []
    for n in dims:
        v = rng.standard_normal(n)
        parts.append(v / np.linalg.norm(v))
    return BlockVector(tuple(parts))


def test_from_flat_is_row_major():
    A = DenseTensor.from_flat((2, 2, 2), range(1, 9))
    assert A.array[0, 0, 1] == 2.0
    assert A.array[1, 0, 0] == 5.0
    assert A.dims == (2, 2, 2)
    assert A.order == 3


def test_from_flat_rejects_wrong_length():
    with pytest.raises(DimensionMismatchError):
        DenseTensor.from_flat((2, 3), range(5))


def test_tensor_is_read_only():
    A = DenseTensor(np.ones((2, 2)))
    with pytest.raises(ValueError):
        A.array[0, 0] = 5.0


def test_construction_copies_input():
    raw = np.ones((2, 2, 2))
    A = DenseTensor(raw)
    raw[0, 0, 0] = 9.0
    assert A.array[0, 0, 0] == 1.0


def test_inner_and_norm(rng):
    A = DenseTensor(rng.standard_normal((3, 4, 2)))
    B = DenseTensor(rng.standard_normal((3, 4, 2)))
    assert inner(A, B) == pytest.approx(float(np.sum(A.array * B.array)))
    assert norm(A) == pytest.approx(float(np.sqrt(np.sum(A.array ** 2))))


def test_inner_rejects_dim_mismatch(rng):
    with pytest.raises(DimensionMismatchError):
        inner(DenseTensor(np.ones((2, 2))), DenseTensor(np.ones((2, 3))))


def test_contract_full_matches_einsum(rng):
    A = DenseTensor(rng.standard_normal((3, 4, 5)))
    x = _random_block(rng, A.dims)
    expected = np.einsum("abc,a,b,c->", A.array, x[0], x[1], x[2])
    assert contract_full(A, x) == pytest.approx(expected, rel=1e-12)


def test_contract_mode_adjoint_identity(rng):
    A = DenseTensor(rng.standard_normal((3, 4, 5, 2)))
    x = _random_block(rng, A.dims)
    for i in range(A.order):
        y = rng.standard_normal(A.dims[i])
        lhs = float(np.dot(contract_mode(A, x, i), y))
        rhs = contract_full(A, x.replace(i, y))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_contraction_bounded_by_norm(rng):
    A = DenseTensor(rng.standard_normal((4, 4, 4)))
    for _ in range(20):
        x = _random_block(rng, A.dims)
        assert abs(contract_full(A, x)) <= norm(A) + 1e-12


def test_contract_full_is_multilinear(rng):
    A = DenseTensor(rng.standard_normal((3, 3, 3)))
    x = _random_block(rng, A.dims)
    y = rng.standard_normal(3)
    a, b = 2.5, -1.5
    combined = contract_full(A, x.replace(1, a * x[1] + b * y))
    split = a * contract_full(A, x) + b * contract_full(A, x.replace(1, y))
    assert combined == pytest.approx(split, rel=1e-12)


def test_unfold_fold_inverse(rng):
    A = DenseTensor(rng.standard_normal((2, 3, 4)))
    for i in range(3):
        M = unfold(A, i)
        assert M.shape == (A.dims[i], A.size // A.dims[i])
        np.testing.assert_array_equal(fold(M, i, A.dims).array, A.array)


@pytest.mark.parametrize("i", [3, -1])
def test_fold_rejects_mode_out_of_range(i):
    with pytest.raises(DimensionMismatchError):
        fold(np.zeros((2, 12)), i, (2, 3, 4))


def test_multilinear_multiply_matches_loop(rng):
    A = DenseTensor(rng.standard_normal((2, 3, 2)))
    Bs = [rng.standard_normal((3, 2)), rng.standard_normal((2, 3)), rng.standard_normal((4, 2))]
    result = multilinear_multiply(Bs, A)
    expected = np.zeros((3, 2, 4))
    for i1, i2, i3 in itertools.product(range(3), range(2), range(4)):
        for j1, j2, j3 in itertools.product(range(2), range(3), range(2)):
            expected[i1, i2, i3] += Bs[0][i1, j1] * Bs[1][i2, j2] * Bs[2][i3, j3] * A.array[j1, j2, j3]
    np.testing.assert_allclose(result.array, expected, atol=1e-12)


def test_multilinear_multiply_rejects_bad_shapes(rng):
    A = DenseTensor(rng.standard_normal((2, 3, 2)))
    with pytest.raises(DimensionMismatchError):
        multilinear_multiply([np.eye(2), np.eye(2), np.eye(2)], A)


def test_diag_round_trip():
    lam = np.array([3.0, -2.0, 0.5])
    T = diag_tensor(lam, 3)
    assert T.dims == (3, 3, 3)
    np.testing.assert_array_equal(extract_diag(T), lam)
    assert norm(T) == pytest.approx(float(np.linalg.norm(lam)))


def test_extract_diag_needs_cubical_tensor():
    with pytest.raises(DimensionMismatchError):
        extract_diag(DenseTensor(np.ones((2, 3, 2))))


def test_assemble_matches_multilinear_multiply(rng):
    factors = [np.linalg.qr(rng.standard_normal((n, 2)))[0] for n in (4, 3, 5)]
    lam = np.array([2.0, -0.5])
    via_diag = multilinear_multiply(factors, diag_tensor(lam, 3))
    np.testing.assert_allclose(assemble(factors, lam).array, via_diag.array, atol=1e-12)


def test_assemble_rejects_lambda_length(rng):
    factors = [np.eye(3)[:, :2]] * 3
    with pytest.raises(DimensionMismatchError):
        assemble(factors, [1.0, 2.0, 3.0])


def test_mode_contractions_columns_match_contract_mode(rng):
    A = DenseTensor(rng.standard_normal((3, 4, 5)))
    factors = [rng.standard_normal((n, 2)) for n in A.dims]
    for i in range(3):
        V = mode_contractions(A, factors, i)
        for j in range(2):
            x = BlockVector(tuple(F[:, j] for F in factors))
            np.testing.assert_allclose(V[:, j], contract_mode(A, x, i), atol=1e-12)
