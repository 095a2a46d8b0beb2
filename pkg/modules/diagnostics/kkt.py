"""
First-order optimality: KKT residuals, the Riemannian gradient of
g(U, x) = 1/2 ||A - sum_j x_j u^(1)_j ⊗ ... ⊗ u^(k)_j||^2, and KKT reduction.

Gradient convention: with f = sum_j lambda_j^2 the Euclidean mode gradient is
2 V^(i) Lambda. Residuals below use X = V^(i) Lambda; KktReport also carries the
total scaled to the 2 V Lambda convention.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from modules.matrix_kernels import svd, tangent_project
from modules.solver import FactorSet, lambda_of
from modules.tensor_core import DenseTensor, assemble, mode_contractions, norm
from shared.core.exceptions import DimensionMismatchError
from shared.utils.logger import setup_logger

logger = setup_logger(__name__)

PRIMITIVE_REL_TOL = 1e-12


@dataclass(frozen=True)
class KktReport:
    """Per-mode KKT quantities at a factor set."""
    mode_residuals: Tuple[float, ...]
    multipliers: Tuple[np.ndarray, ...] = field(repr=False)
    symmetry_defects: Tuple[float, ...]
    sigma_min: Tuple[float, ...]
    lam: np.ndarray = field(repr=False)
    primitive: bool

    @property
    def total(self) -> float:
        return float(np.sqrt(sum(rho * rho for rho in self.mode_residuals)))

    @property
    def total_gradient_convention(self) -> float:
        """Total residual with X = 2 V Lambda, the gradient of f."""
        return 2.0 * self.total

    @property
    def max_symmetry_defect(self) -> float:
        return max(self.symmetry_defects)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "total": self.total,
            "total_gradient_convention": self.total_gradient_convention,
            "mode_residuals": list(self.mode_residuals),
            "symmetry_defects": list(self.symmetry_defects),
            "sigma_min": list(self.sigma_min),
            "primitive": self.primitive,
            "lambda": [float(v) for v in self.lam],
        }


def kkt_residual(A: DenseTensor, U: Sequence[np.ndarray]) -> KktReport:
    """
    rho_i = ||X - U X^T U||_F with X = V^(i) Lambda.

    rho_i vanishes iff X = U P_i with P_i = U^T X symmetric, so the total is zero
    exactly at KKT points. The point is primitive when no lambda_j vanishes.
    """
    if len(U) != A.order:
        raise DimensionMismatchError(f"Expected {A.order} factors, got {len(U)}")
    lam = lambda_of(A, U)
    residuals, multipliers, defects, sigmas = [], [], [], []
    for i in range(A.order):
        X = mode_contractions(A, U, i) * lam
        P = U[i].T @ X
        residuals.append(float(np.linalg.norm(X - U[i] @ P.T)))
        multipliers.append(0.5 * (P + P.T))
        defects.append(float(np.linalg.norm(P - P.T)))
        sigmas.append(svd(X).sigma_min)
    scale = max(1.0, float(np.max(np.abs(lam))))
    primitive = bool(np.all(np.abs(lam) > PRIMITIVE_REL_TOL * scale))
    return KktReport(
        mode_residuals=tuple(residuals),
        multipliers=tuple(multipliers),
        symmetry_defects=tuple(defects),
        sigma_min=tuple(sigmas),
        lam=lam,
        primitive=primitive,
    )


def objective_g(A: DenseTensor, U: Sequence[np.ndarray], x: Sequence[float]) -> float:
    """g(U, x) = 1/2 ||A - assemble(U, x)||^2; U need not be orthonormal."""
    return 0.5 * norm(A - assemble(U, x)) ** 2


@dataclass(frozen=True)
class RiemannianGradient:
    modes: Tuple[np.ndarray, ...]
    x_part: np.ndarray

    def inner(self, directions: Sequence[np.ndarray], y: Sequence[float]) -> float:
        """<grad, (D, y)> for mode directions D and an x direction y."""
        total = sum(float(np.sum(G * D)) for G, D in zip(self.modes, directions))
        return total + float(np.dot(self.x_part, y))

    @property
    def norm(self) -> float:
        return float(np.sqrt(sum(np.linalg.norm(G) ** 2 for G in self.modes) + np.dot(self.x_part, self.x_part)))


def riemannian_grad_g(A: DenseTensor, U: Sequence[np.ndarray], x: Sequence[float]) -> RiemannianGradient:
    """
    Riemannian gradient of g at (U, x) on the product of Stiefel manifolds.

    Mode part: -(I - 1/2 U U^T)(V Gamma - U (V Gamma)^T U), Gamma = diag(x).
    x part: x - lambda(U).
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if len(U) != A.order:
        raise DimensionMismatchError(f"Expected {A.order} factors, got {len(U)}")
    if x.size != U[0].shape[1]:
        raise DimensionMismatchError(f"x has {x.size} entries, factors have {U[0].shape[1]} columns")
    modes = tuple(
        -tangent_project(U[i], mode_contractions(A, U, i) * x)
        for i in range(A.order)
    )
    return RiemannianGradient(modes=modes, x_part=x - lambda_of(A, U))


def reduce_kkt_point(A: DenseTensor, U: FactorSet, tol: float = 1e-9) -> Tuple[FactorSet, List[int]]:
    """
    Delete the columns with lambda_j = 0 (|lambda_j| <= tol * max(1, max|lambda|)).

    A KKT point stays a KKT point of the lower rank after the deletion.

    Returns:
        (reduced factor set, removed indices)

    Raises:
        DimensionMismatchError: If every lambda_j vanishes
    """
    lam = lambda_of(A, U)
    scale = max(1.0, float(np.max(np.abs(lam))))
    J = [int(j) for j in np.flatnonzero(np.abs(lam) <= tol * scale)]
    if len(J) == U.rank:
        raise DimensionMismatchError("Every lambda_j vanishes; no primitive part to keep")
    if J:
        logger.debug(f"Reducing KKT point: removing columns {J}")
    return U.remove_columns(J), J
