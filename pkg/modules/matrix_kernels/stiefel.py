"""
Stiefel manifold geometry: tangent and normal projections, orthonormal completion
and seeded random points.
"""

from typing import Optional

import numpy as np
import scipy.linalg

from modules.matrix_kernels.factorizations import OrthonormalMatrix, as_matrix, polar
from shared.core.exceptions import DimensionMismatchError
from shared.utils.rng import SeedLike, as_generator


def skew(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M - M.T)


def sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def _same_shape(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape != B.shape:
        raise DimensionMismatchError(f"Shapes differ: {A.shape} vs {B.shape}")


def tangent_project(A, B) -> np.ndarray:
    """
    Projection of B onto the tangent space of V(m, n) at A:
    (I - A A^T / 2)(B - A B^T A).
    """
    A, B = as_matrix(A), as_matrix(B)
    _same_shape(A, B)
    D = B - A @ (B.T @ A)
    return D - 0.5 * A @ (A.T @ D)


def normal_project(A, B) -> np.ndarray:
    """Projection of B onto the normal space at A: A (A^T B + B^T A) / 2."""
    A, B = as_matrix(A), as_matrix(B)
    _same_shape(A, B)
    return A @ sym(A.T @ B)


def random_orthonormal(n: int, r: int, seed: SeedLike) -> OrthonormalMatrix:
    """
    Seeded random point of V(r, n): QR of a Gaussian matrix with the signs of
    R's diagonal made positive.

    Raises:
        DimensionMismatchError: If r > n
    """
    if r > n or r < 0:
        raise DimensionMismatchError(f"random_orthonormal needs 0 <= r <= n, got n={n}, r={r}")
    rng = as_generator(seed)
    Q, R = np.linalg.qr(rng.standard_normal((n, r)))
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return OrthonormalMatrix(Q * signs)


def complete_orthonormal(U, align_to: Optional[np.ndarray] = None) -> OrthonormalMatrix:
    """
    Orthonormal W (n x (n - r)) such that [U W] is orthogonal.

    With align_to = V_2 (n x (n - r)), the completion is rotated towards V_2:
    W = U_2 Q with Q the polar factor of U_2^T V_2. Then for V = [V_1 V_2]
    orthogonal, ||[U W] - V||_F^2 <= 2 ||U - V_1||_F^2.
    """
    U = as_matrix(U)
    n, r = U.shape
    if r > n:
        raise DimensionMismatchError(f"complete_orthonormal needs r <= n, got {U.shape}")
    if r == n:
        return OrthonormalMatrix(np.zeros((n, 0)))
    U2 = scipy.linalg.null_space(U.T)
    if align_to is None:
        return OrthonormalMatrix(U2)
    V2 = as_matrix(align_to)
    if V2.shape != U2.shape:
        raise DimensionMismatchError(f"Alignment reference must be {U2.shape}, got {V2.shape}")
    Q = polar(U2.T @ V2).U.matrix
    return OrthonormalMatrix(U2 @ Q)
