"""
Per-mode iAPD updates.

A sweep updates the modes in order. While mode i is being updated, the working
state mixes modes < i from the current sweep with modes >= i from the previous
one; mode_matrices reads V^(i) and lambda^{i-1} off that state.
"""

from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from modules.matrix_kernels import polar, svd
from modules.solver.types import FactorSet, ModeUpdate, ProximalMode, SolverParameters, UpdateCase
from modules.tensor_core import DenseTensor, mode_contractions
from shared.core.exceptions import ConfigurationException
from shared.utils.logger import setup_logger

logger = setup_logger(__name__)


class ModeMatrices(NamedTuple):
    """V^(i) (n_i x r) and the diagonal of Lambda^(i)."""
    V: np.ndarray
    lam: np.ndarray

    @property
    def Lambda(self) -> np.ndarray:
        return np.diag(self.lam)

    @property
    def weighted(self) -> np.ndarray:
        """V^(i) Lambda^(i)."""
        return self.V * self.lam


def mode_matrices(A: DenseTensor, state: Sequence[np.ndarray], i: int) -> ModeMatrices:
    """
    Column j of V^(i) is A tau_i(x_j) with x_j the j-th columns of state;
    Lambda^(i) = diag(<u^(i)_j, v_j>).
    """
    V = mode_contractions(A, state, i)
    lam = np.einsum("ij,ij->j", state[i], V)
    return ModeMatrices(V, lam)


def lambda_of(A: DenseTensor, U: Sequence[np.ndarray]) -> np.ndarray:
    """lambda_j(U) = A tau(u^(1)_j, ..., u^(k)_j)."""
    return mode_matrices(A, U, 0).lam


def objective_f(A: DenseTensor, U: Sequence[np.ndarray]) -> float:
    """f(U) = sum_j lambda_j(U)^2."""
    lam = lambda_of(A, U)
    return float(np.dot(lam, lam))


def kkt_mode_residuals(A: DenseTensor, U: Sequence[np.ndarray]) -> np.ndarray:
    """rho_i = ||X - U X^T U||_F with X = V^(i) Lambda at the point U."""
    lam = lambda_of(A, U)
    rho = np.empty(len(U))
    for i in range(len(U)):
        X = mode_contractions(A, U, i) * lam
        rho[i] = np.linalg.norm(X - U[i] @ (X.T @ U[i]))
    return rho


def _finish(mm: ModeMatrices, factor: np.ndarray, case: UpdateCase, sigma: np.ndarray,
            symmetry_defect: Optional[float] = None) -> ModeUpdate:
    lam_after = np.einsum("ij,ij->j", factor, mm.V)
    return ModeUpdate(
        factor=factor,
        case=case,
        sigma=sigma,
        lam_before=mm.lam,
        lam_after=lam_after,
        symmetry_defect=symmetry_defect,
    )


def _classic_step(mm: ModeMatrices, U_old: np.ndarray, epsilon: float, proximal: bool) -> ModeUpdate:
    X = mm.weighted
    res = svd(X)
    if not proximal or res.sigma_min >= epsilon:
        return _finish(mm, res.G @ res.H.T, UpdateCase.POLAR, res.sigma)
    corrected = polar(X + epsilon * U_old).U.matrix
    return _finish(mm, np.array(corrected), UpdateCase.PROXIMAL, res.sigma)


def apd_mode_update(A: DenseTensor, state: Sequence[np.ndarray], i: int,
                    params: SolverParameters) -> ModeUpdate:
    """
    Substep 1 (polar decomposition) and the classic Substep 2 on mode i.

    The polar factor of V Lambda is kept when sigma_r(V Lambda) >= epsilon.
    Otherwise the factor is replaced by the polar factor of V Lambda + eps U_old.
    With proximal_mode none, Substep 2 is skipped.
    """
    mm = mode_matrices(A, state, i)
    proximal = params.proximal_mode is not ProximalMode.NONE
    return _classic_step(mm, state[i], params.epsilon, proximal)


def revised_mode_update(A: DenseTensor, state: Sequence[np.ndarray], i: int,
                        params: SolverParameters) -> ModeUpdate:
    """
    Substep 1 with the revised Substep 2.

    When sigma_r < epsilon, r == n_i and sigma_{r-1} >= tau, the last left singular
    vector g_r is flipped if it points away from (U_old H)_r, and U = G_hat H^T.
    Then U^T V Lambda is symmetric. Every other small-sigma case falls back to
    the classic proximal correction.

    Raises:
        ConfigurationException: If tau is missing or tau <= epsilon
    """
    if params.tau is None or params.tau <= params.epsilon:
        raise ConfigurationException("Revised proximal step needs tau > epsilon")
    mm = mode_matrices(A, state, i)
    X = mm.weighted
    U_old = state[i]
    n_i, r = X.shape
    res = svd(X)
    if res.sigma_min >= params.epsilon:
        return _finish(mm, res.G @ res.H.T, UpdateCase.POLAR, res.sigma)
    if r == n_i and r >= 2 and res.sigma[r - 2] >= params.tau:
        G = np.array(res.G)
        reference = U_old @ res.H
        if np.dot(G[:, r - 1], reference[:, r - 1]) < 0:
            G[:, r - 1] = -G[:, r - 1]
        factor = G @ res.H.T
        S = factor.T @ X
        defect = float(np.linalg.norm(S - S.T))
        logger.debug(f"Revised step on mode {i + 1}: sigma_r={res.sigma_min:.3e}, symmetry defect {defect:.2e}")
        return _finish(mm, factor, UpdateCase.REVISED_FLIP, res.sigma, symmetry_defect=defect)
    corrected = polar(X + params.epsilon * U_old).U.matrix
    return _finish(mm, np.array(corrected), UpdateCase.PROXIMAL, res.sigma)


def truncate(U: FactorSet, lam: np.ndarray, kappa: float) -> Tuple[FactorSet, Tuple[int, ...]]:
    """
    Remove every column j with |lambda_j| < kappa.

    The column with the largest |lambda| is always kept, so the rank stays >= 1.

    Returns:
        (new factor set, removed indices)
    """
    lam = np.asarray(lam, dtype=np.float64)
    J = [int(j) for j in np.flatnonzero(np.abs(lam) < kappa)]
    if len(J) == lam.size:
        keep = int(np.argmax(np.abs(lam)))
        logger.warning(f"Every |lambda_j| is below kappa={kappa:.3e}; keeping column {keep}")
        J.remove(keep)
    if not J:
        return U, ()
    return U.remove_columns(J), tuple(J)
