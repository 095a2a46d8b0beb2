"""
Matrix factorizations: SVD, polar decomposition, PSD square root and the polar
error reformulation.

SVDs go through LAPACK via scipy.linalg. The divide-and-conquer driver (gesdd)
is tried first; gesvd is the fallback when it fails to converge.
"""

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
import scipy.linalg

from shared.core.exceptions import DimensionMismatchError, NumericalError
from shared.utils.logger import setup_logger

logger = setup_logger(__name__)

ORTHONORMAL_TOL = 1e-10
RANK_REL_TOL = 1e-12


def as_matrix(M: Union[np.ndarray, "OrthonormalMatrix"]) -> np.ndarray:
    """Return the float64 ndarray behind M."""
    if isinstance(M, OrthonormalMatrix):
        return M.matrix
    arr = np.asarray(M, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"Expected a matrix, got an array of shape {arr.shape}")
    return arr


def stiefel_defect(U: Union[np.ndarray, "OrthonormalMatrix"]) -> float:
    """||U^T U - I||_F."""
    U = as_matrix(U)
    return float(np.linalg.norm(U.T @ U - np.eye(U.shape[1])))


@dataclass(frozen=True, eq=False)
class OrthonormalMatrix:
    """
    n x m matrix with orthonormal columns (m <= n), a point of V(m, n).

    Validated on construction: ||U^T U - I||_F <= tol.
    """
    matrix: np.ndarray
    tol: float = ORTHONORMAL_TOL

    def __post_init__(self):
        arr = np.array(self.matrix, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] > arr.shape[0]:
            raise DimensionMismatchError(f"An orthonormal matrix needs shape n x m with m <= n, got {arr.shape}")
        defect = stiefel_defect(arr)
        if defect > self.tol:
            raise NumericalError(f"Columns are not orthonormal: ||U^T U - I||_F = {defect:.3e}")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def T(self) -> np.ndarray:
        return self.matrix.T


class SvdResult(NamedTuple):
    """Thin SVD M = G diag(sigma) H^T with sigma nonincreasing."""
    G: np.ndarray
    sigma: np.ndarray
    H: np.ndarray

    def numerical_rank(self, rel_tol: float = RANK_REL_TOL) -> int:
        """Count singular values above rel_tol * sigma_1."""
        if self.sigma.size == 0 or self.sigma[0] == 0.0:
            return 0
        return int(np.sum(self.sigma > rel_tol * self.sigma[0]))

    @property
    def sigma_min(self) -> float:
        return float(self.sigma[-1]) if self.sigma.size else 0.0


def svd(M: np.ndarray) -> SvdResult:
    """
    Thin singular value decomposition.

    Returns:
        SvdResult with G (n x min), sigma (nonincreasing), H (m x min)

    Raises:
        NumericalError: If both LAPACK drivers fail or the input is not finite
    """
    M = as_matrix(M)
    last_error: Exception = NumericalError("svd not attempted")
    for driver in ("gesdd", "gesvd"):
        try:
            G, sigma, Ht = scipy.linalg.svd(M, full_matrices=False, lapack_driver=driver)
            return SvdResult(G, sigma, Ht.T)
        except np.linalg.LinAlgError as e:
            logger.warning(f"SVD driver {driver} failed on a {M.shape} matrix: {e}")
            last_error = e
        except ValueError as e:
            raise NumericalError(f"SVD input is not finite: {e}", driver=driver) from e
    raise NumericalError(f"SVD did not converge with gesdd or gesvd: {last_error}", driver="gesvd")


@dataclass(frozen=True, eq=False)
class PolarFactors:
    """Polar decomposition M = U H with U orthonormal and H symmetric PSD."""
    U: OrthonormalMatrix
    H: np.ndarray
    svd: SvdResult


def polar(M: np.ndarray) -> PolarFactors:
    """
    Polar decomposition of an n x m matrix with m <= n.

    U = G H^T maximizes <Q, M> over V(m, n). It is unique when rank(M) = m. For
    rank-deficient M the zero singular directions take whatever basis the SVD
    returned, which is still a valid maximizer.
    """
    M = as_matrix(M)
    if M.shape[1] > M.shape[0]:
        raise DimensionMismatchError(f"polar needs m <= n, got shape {M.shape}")
    res = svd(M)
    U = res.G @ res.H.T
    H = (res.H * res.sigma) @ res.H.T
    H = 0.5 * (H + H.T)
    return PolarFactors(U=OrthonormalMatrix(U), H=H, svd=res)


def psd_sqrt(H: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """
    Square root of a symmetric PSD matrix.

    Eigenvalues in [-tol, 0) are clamped to zero.

    Raises:
        NumericalError: If H is asymmetric or indefinite beyond tol
    """
    H = as_matrix(H)
    if H.shape[0] != H.shape[1]:
        raise DimensionMismatchError(f"psd_sqrt needs a square matrix, got {H.shape}")
    scale = max(1.0, float(np.linalg.norm(H)))
    if np.linalg.norm(H - H.T) > tol * scale:
        raise NumericalError("psd_sqrt input is not symmetric")
    evals, evecs = scipy.linalg.eigh(0.5 * (H + H.T))
    if evals.size and evals[0] < -tol * scale:
        raise NumericalError(f"psd_sqrt input is indefinite (min eigenvalue {evals[0]:.3e})")
    root = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.T
    return 0.5 * (root + root.T)


@dataclass(frozen=True)
class PolarErrorGap:
    """
    Both sides of the polar error reformulation and its Frobenius bound.

    lhs       = ||B - QC||^2 - ||B - WC||^2
    rhs_eq    = ||(W - Q) sqrt(H)||^2          (equal to lhs)
    rhs_bound = sigma_min(A) ||W - Q||^2       (lower bound for lhs when A has full rank)
    """
    lhs: float
    rhs_eq: float
    rhs_bound: float
    sigma_min: float
    full_rank: bool

    def equality_holds(self, tol: float = 1e-8) -> bool:
        return abs(self.lhs - self.rhs_eq) <= tol * (1.0 + abs(self.lhs))

    def bound_holds(self, tol: float = 1e-10) -> bool:
        return (not self.full_rank) or self.lhs >= self.rhs_bound - tol


def polar_error_gap(B: np.ndarray, C: np.ndarray, Q: np.ndarray) -> PolarErrorGap:
    """
    Evaluate the polar error reformulation for B (m x p), C (n x p), Q in V(n, m).

    A = B C^T is formed internally and W, H come from polar(A).
    """
    B, C, Q = as_matrix(B), as_matrix(C), as_matrix(Q)
    m, p = B.shape
    n = C.shape[0]
    if C.shape[1] != p or Q.shape != (m, n) or m < n:
        raise DimensionMismatchError(
            f"polar_error_gap needs B (m x p), C (n x p), Q (m x n) with m >= n; "
            f"got {B.shape}, {C.shape}, {Q.shape}"
        )
    A = B @ C.T
    factors = polar(A)
    W, H = factors.U.matrix, factors.H
    lhs = float(np.linalg.norm(B - Q @ C) ** 2 - np.linalg.norm(B - W @ C) ** 2)
    rhs_eq = float(np.linalg.norm((W - Q) @ psd_sqrt(H, tol=1e-8)) ** 2)
    sigma_min = factors.svd.sigma_min
    rhs_bound = sigma_min * float(np.linalg.norm(W - Q) ** 2)
    full_rank = factors.svd.numerical_rank() == n
    return PolarErrorGap(lhs=lhs, rhs_eq=rhs_eq, rhs_bound=rhs_bound, sigma_min=sigma_min, full_rank=full_rank)


def polar_argmax_gap(M: np.ndarray, Q: np.ndarray) -> float:
    """<U, M> - <Q, M> for the polar factor U of M; nonnegative for every orthonormal Q."""
    M, Q = as_matrix(M), as_matrix(Q)
    U = polar(M).U.matrix
    return float(np.sum(U * M) - np.sum(Q * M))
