"""
Multilinear operations on dense tensors.

Contractions are computed as the mode-i unfolding times a Kronecker-structured
vector (or a Khatri-Rao product for a whole factor set), so no k-deep loops are
needed.
"""

from functools import reduce
from typing import Sequence

import numpy as np
from scipy.linalg import khatri_rao

from modules.tensor_core.dense_tensor import BlockVector, DenseTensor
from shared.core.exceptions import DimensionMismatchError


def _check_mode(A: DenseTensor, i: int) -> None:
    if not 0 <= i < A.order:
        raise DimensionMismatchError(f"Mode index {i} out of range for a tensor of order {A.order}")


def _check_same_dims(A: DenseTensor, B: DenseTensor) -> None:
    if A.dims != B.dims:
        raise DimensionMismatchError(f"Tensor dims differ: {A.dims} vs {B.dims}")


def inner(A: DenseTensor, B: DenseTensor) -> float:
    """Hilbert-Schmidt inner product."""
    _check_same_dims(A, B)
    return float(np.dot(A.data, B.data))


def norm(A: DenseTensor) -> float:
    """Hilbert-Schmidt norm."""
    return float(np.linalg.norm(A.data))


def unfold(A: DenseTensor, i: int) -> np.ndarray:
    """
    Row-major mode-i flattening.

    Row index is the mode-i index; the remaining modes keep their order with the
    last one varying fastest.
    """
    _check_mode(A, i)
    return np.moveaxis(A.array, i, 0).reshape(A.dims[i], -1)


def fold(M: np.ndarray, i: int, dims: Sequence[int]) -> DenseTensor:
    """Inverse of unfold."""
    dims = tuple(int(n) for n in dims)
    if not 0 <= i < len(dims):
        raise DimensionMismatchError(f"Mode index {i} out of range for a tensor of order {len(dims)}")
    rest = dims[:i] + dims[i + 1:]
    M = np.asarray(M, dtype=np.float64)
    if M.shape != (dims[i], int(np.prod(rest)) if rest else 1):
        raise DimensionMismatchError(f"Matrix of shape {M.shape} cannot be folded into {dims} along mode {i}")
    return DenseTensor(np.moveaxis(M.reshape((dims[i],) + rest), 0, i))


def _kron_all(parts: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, parts, np.ones(1))


def contract_mode(A: DenseTensor, x: BlockVector, i: int) -> np.ndarray:
    """
    Contract A with every part of x except part i.

    The result v satisfies <v, y> == contract_full(A, x with part i replaced by y).
    Part i of x is ignored.
    """
    _check_mode(A, i)
    x.check_dims(A.dims)
    others = [x[m] for m in range(A.order) if m != i]
    return unfold(A, i) @ _kron_all(others)


def contract_full(A: DenseTensor, x: BlockVector) -> float:
    """Full contraction <A, x_1 ⊗ ... ⊗ x_k>."""
    return float(contract_mode(A, x, 0) @ x[0])


def khatri_rao_all(factors: Sequence[np.ndarray], r: int) -> np.ndarray:
    """Column-wise Kronecker product of a list of matrices (ones row if empty)."""
    if not factors:
        return np.ones((1, r))
    return reduce(khatri_rao, factors)


def mode_contractions(A: DenseTensor, factors: Sequence[np.ndarray], i: int) -> np.ndarray:
    """
    All columns v_j = A tau_i(x_j) at once, where x_j takes column j of each factor.

    Returns:
        n_i x r matrix
    """
    _check_mode(A, i)
    _check_factor_shapes(A.dims, factors)
    r = factors[0].shape[1]
    others = [factors[m] for m in range(A.order) if m != i]
    return unfold(A, i) @ khatri_rao_all(others, r)


def _check_factor_shapes(dims: Sequence[int], factors: Sequence[np.ndarray]) -> None:
    if len(factors) != len(dims):
        raise DimensionMismatchError(f"Expected {len(dims)} factors, got {len(factors)}")
    ranks = {f.shape[1] for f in factors}
    if len(ranks) != 1:
        raise DimensionMismatchError(f"Factors disagree on column count: {sorted(ranks)}")
    for n, f in zip(dims, factors):
        if f.shape[0] != n:
            raise DimensionMismatchError(f"Factor with {f.shape[0]} rows does not match dimension {n}")


def multilinear_multiply(Bs: Sequence[np.ndarray], A: DenseTensor) -> DenseTensor:
    """
    Matrix-tensor product (B^(1), ..., B^(k)) · A.

    Entry (i_1..i_k) of the result is sum over j of prod_t B^(t)_{i_t j_t} a_{j_1..j_k}.
    """
    if len(Bs) != A.order:
        raise DimensionMismatchError(f"Expected {A.order} matrices, got {len(Bs)}")
    T = A.array
    for i, B in enumerate(Bs):
        B = np.asarray(B, dtype=np.float64)
        if B.ndim != 2 or B.shape[1] != A.dims[i]:
            raise DimensionMismatchError(
                f"Matrix {i} has shape {B.shape}, needs {A.dims[i]} columns"
            )
        T = np.moveaxis(np.tensordot(B, T, axes=(1, i)), 0, i)
    return DenseTensor(T)


def diag_tensor(lam: Sequence[float], k: int) -> DenseTensor:
    """Diagonal tensor in R^r ⊗ ... ⊗ R^r with lam on the superdiagonal."""
    lam = np.asarray(lam, dtype=np.float64).reshape(-1)
    r = lam.size
    if r < 1 or k < 1:
        raise DimensionMismatchError(f"diag_tensor needs r >= 1 and k >= 1, got r={r}, k={k}")
    arr = np.zeros((r,) * k)
    idx = np.arange(r)
    arr[(idx,) * k] = lam
    return DenseTensor(arr)


def extract_diag(T: DenseTensor) -> np.ndarray:
    """Diagonal entries T[j, ..., j] of a cubical tensor."""
    r = T.dims[0]
    if any(n != r for n in T.dims):
        raise DimensionMismatchError(f"extract_diag needs equal dimensions, got {T.dims}")
    idx = np.arange(r)
    return np.array(T.array[(idx,) * T.order])


def assemble(factors: Sequence[np.ndarray], lam: Sequence[float]) -> DenseTensor:
    """
    Orthogonally decomposable tensor sum_j lam_j u^(1)_j ⊗ ... ⊗ u^(k)_j.

    Same value as multilinear_multiply(factors, diag_tensor(lam, k)), computed
    through the mode-1 unfolding.
    """
    factors = [np.asarray(f, dtype=np.float64) for f in factors]
    lam = np.asarray(lam, dtype=np.float64).reshape(-1)
    dims = tuple(f.shape[0] for f in factors)
    _check_factor_shapes(dims, factors)
    r = factors[0].shape[1]
    if lam.size != r:
        raise DimensionMismatchError(f"lambda has {lam.size} entries, factors have {r} columns")
    M = (factors[0] * lam) @ khatri_rao_all(factors[1:], r).T
    return fold(M, 0, dims)
