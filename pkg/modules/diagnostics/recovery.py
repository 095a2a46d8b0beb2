"""
Distance between a computed decomposition and a known ground truth.

Odeco decompositions are unique up to column order and signs, so columns are
matched before comparing.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from modules.solver import Solution
from shared.utils.logger import setup_logger

logger = setup_logger(__name__)

TIE_TOL = 1e-12


@dataclass(frozen=True)
class RecoveryError:
    lambda_error: float
    subspace_error: float
    matching: Tuple[int, ...]
    rank_mismatch: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda_error": self.lambda_error,
            "subspace_error": self.subspace_error,
            "matching": list(self.matching),
            "rank_mismatch": self.rank_mismatch,
        }


def _correlation(factors: Sequence[np.ndarray], truth: Sequence[np.ndarray], j: int, t: int) -> float:
    """Product over modes of |<u_j, u*_t>|."""
    return float(np.prod([abs(np.dot(U[:, j], T[:, t])) for U, T in zip(factors, truth)]))


def recovery_error(sol: Solution, truth: Tuple[Sequence[np.ndarray], Sequence[float]]) -> RecoveryError:
    """
    Greedy match by |lambda| (descending), ties broken by column correlation.

    lambda_error  = max_j ||lambda_j| - |lambda*_pi(j)||
    subspace_error = max over modes and matched columns of sin(angle(u_j, u*_pi(j)))

    A rank mismatch sets both errors to infinity.
    """
    true_factors, true_lam = truth
    true_factors = [np.asarray(T, dtype=np.float64) for T in true_factors]
    true_lam = np.asarray(true_lam, dtype=np.float64).reshape(-1)
    factors = list(sol.factors)
    lam = np.asarray(sol.lam)

    if lam.size != true_lam.size:
        logger.info(f"Rank mismatch: solution rank {lam.size}, truth rank {true_lam.size}")
        return RecoveryError(math.inf, math.inf, (), rank_mismatch=True)

    available: List[int] = list(range(true_lam.size))
    matching: List[Tuple[int, int]] = []
    for j in np.argsort(-np.abs(lam), kind="stable"):
        gaps = [abs(abs(lam[j]) - abs(true_lam[t])) for t in available]
        best = min(gaps)
        tied = [t for t, g in zip(available, gaps) if g <= best + TIE_TOL]
        choice = max(tied, key=lambda t: _correlation(factors, true_factors, j, t))
        matching.append((int(j), choice))
        available.remove(choice)

    lambda_error = 0.0
    subspace_error = 0.0
    pi = [0] * lam.size
    for j, t in matching:
        pi[j] = t
        lambda_error = max(lambda_error, abs(abs(lam[j]) - abs(true_lam[t])))
        for U, T in zip(factors, true_factors):
            u, v = U[:, j], T[:, t]
            # norm of the part of u orthogonal to v; accurate for small angles
            sine = float(np.linalg.norm(u - np.dot(u, v) * v))
            subspace_error = max(subspace_error, sine)
    return RecoveryError(lambda_error, subspace_error, tuple(pi))
