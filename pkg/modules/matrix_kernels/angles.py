"""
Principal angles between subspaces and the orthonormal-pair inequalities built on
them.
"""

import numpy as np

from modules.matrix_kernels.factorizations import as_matrix, svd
from modules.matrix_kernels.stiefel import complete_orthonormal
from shared.core.exceptions import DimensionMismatchError


def principal_angles(U, V) -> np.ndarray:
    """
    Principal angles between span(U) and span(V), nondecreasing in [0, pi/2].

    cos(theta_i) = sigma_i(U^T V).
    """
    U, V = as_matrix(U), as_matrix(V)
    if U.shape != V.shape:
        raise DimensionMismatchError(f"principal_angles needs equal shapes, got {U.shape} and {V.shape}")
    sigma = svd(U.T @ V).sigma
    return np.arccos(np.clip(sigma, 0.0, 1.0))


def nonzero_angles(angles: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Sorted angles above tol."""
    angles = np.sort(np.asarray(angles, dtype=np.float64))
    return angles[angles > tol]


def trace_inequality_gap(U, V) -> float:
    """sum_j sigma_j(U^T V) - <U, V>; nonnegative for orthonormal U, V."""
    U, V = as_matrix(U), as_matrix(V)
    return float(np.sum(svd(U.T @ V).sigma) - np.sum(U * V))


def stiefel_distance_gap(U, V) -> float:
    """||U - V||_F^2 - ||U^T V - I||_F^2; nonnegative for orthonormal U, V."""
    U, V = as_matrix(U), as_matrix(V)
    if U.shape != V.shape:
        raise DimensionMismatchError(f"Shapes differ: {U.shape} vs {V.shape}")
    I = np.eye(U.shape[1])
    return float(np.linalg.norm(U - V) ** 2 - np.linalg.norm(U.T @ V - I) ** 2)


def completion_bound_gap(U, V) -> float:
    """
    2 ||U - V_1||_F^2 - ||P - V||_F^2 for an orthogonal V = [V_1 V_2].

    P = [U W] where W completes U aligned to V_2. Nonnegative.
    """
    U, V = as_matrix(U), as_matrix(V)
    n, r = U.shape
    if V.shape != (n, n):
        raise DimensionMismatchError(f"Reference must be {n} x {n} orthogonal, got {V.shape}")
    V1, V2 = V[:, :r], V[:, r:]
    W = complete_orthonormal(U, align_to=V2).matrix
    P = np.hstack([U, W])
    return float(2.0 * np.linalg.norm(U - V1) ** 2 - np.linalg.norm(P - V) ** 2)
