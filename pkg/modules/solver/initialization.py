"""
Starting points for the solver (Step 0): f(U_[0]) must be positive.
"""

from typing import Sequence

import numpy as np

from modules.matrix_kernels import random_orthonormal, svd
from modules.solver.types import FactorSet, InitStrategy
from modules.solver.updates import objective_f
from modules.tensor_core import DenseTensor, norm, unfold
from shared.core.exceptions import DimensionMismatchError, InitializationError
from shared.utils.logger import setup_logger
from shared.utils.rng import make_generator

logger = setup_logger(__name__)

MAX_RANDOM_ATTEMPTS = 100
# f(U_[0]) below this fraction of ||A||^2 is roundoff, not a usable start
F0_REL_TOL = 1e-14

# stream id for initialization draws
INIT_STREAM = 1


def _usable(f0: float, norm_sq: float) -> bool:
    return f0 > F0_REL_TOL * norm_sq


def hosvd_factors(A: DenseTensor, r: int) -> FactorSet:
    """Leading r left singular vectors of every mode-i flattening."""
    return FactorSet.of([np.array(svd(unfold(A, i)).G[:, :r]) for i in range(A.order)])


def random_factors(A: DenseTensor, r: int, seed: int, stream: Sequence[int] = ()) -> FactorSet:
    """
    Seeded random orthonormal factors, redrawn until f > 0.

    Draws come from the PCG64 stream (seed, INIT_STREAM, *stream); benchmark
    runs pass (experiment, repeat, mode) so every run gets its own child.

    Raises:
        InitializationError: If MAX_RANDOM_ATTEMPTS draws all give f ~ 0
    """
    rng = make_generator(seed, INIT_STREAM, *stream)
    norm_sq = norm(A) ** 2
    for attempt in range(1, MAX_RANDOM_ATTEMPTS + 1):
        U = FactorSet(tuple(random_orthonormal(n, r, rng) for n in A.dims))
        if _usable(objective_f(A, U), norm_sq):
            if attempt > 1:
                logger.debug(f"Random start accepted after {attempt} draws")
            return U
    raise InitializationError(f"No random start with f > 0 after {MAX_RANDOM_ATTEMPTS} attempts")


def init_factors(A: DenseTensor, r: int, strategy: InitStrategy = InitStrategy.HOSVD,
                 seed: int = 0, stream: Sequence[int] = ()) -> FactorSet:
    """
    Choose U_[0] with f(U_[0]) > 0.

    HOSVD starts that land on f ~ 0 fall back to seeded random draws.

    Raises:
        DimensionMismatchError: If r is outside [1, min n_i]
        InitializationError: If A is zero or no start with f > 0 is found
    """
    if not 1 <= r <= min(A.dims):
        raise DimensionMismatchError(f"Rank {r} must lie in [1, {min(A.dims)}] for dims {A.dims}")
    norm_sq = norm(A) ** 2
    if norm_sq == 0.0:
        raise InitializationError("Cannot initialize on the zero tensor: f(U) = 0 for every U")

    strategy = InitStrategy(strategy)
    if strategy is InitStrategy.HOSVD:
        U = hosvd_factors(A, r)
        if _usable(objective_f(A, U), norm_sq):
            return U
        logger.warning("HOSVD start has f ~ 0; falling back to random starts")
    return random_factors(A, r, seed, stream)
