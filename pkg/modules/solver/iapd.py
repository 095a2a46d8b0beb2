"""
iAPD: alternating polar decompositions with adaptive proximal correction and
truncation.

Each sweep updates modes 1..k in order (Step 1), then removes columns with
small |lambda| (Step 2) and tests the stopping rule (Step 3).
"""

import time
from typing import List, Optional

import numpy as np

from modules.solver.config import SolverConfig
from modules.solver.initialization import init_factors
from modules.solver.types import (
    FactorSet,
    ModeUpdate,
    ProximalMode,
    Solution,
    SolverParameters,
    SweepRecord,
    SweepTrace,
    TerminationReason,
    UpdateCase,
)
from modules.solver.updates import (
    apd_mode_update,
    kkt_mode_residuals,
    lambda_of,
    objective_f,
    revised_mode_update,
    truncate,
)
from modules.tensor_core import DenseTensor, assemble, norm
from shared.core.exceptions import DimensionMismatchError, InitializationError, NumericalError
from shared.utils.logger import setup_logger

logger = setup_logger(__name__)


def _validate_problem(A: DenseTensor, r: int) -> None:
    if A.order < 3:
        raise DimensionMismatchError(f"The solver needs a tensor of order k >= 3, got k={A.order}")
    if not 1 <= r <= min(A.dims):
        raise DimensionMismatchError(f"Rank {r} must lie in [1, {min(A.dims)}] for dims {A.dims}")
    if norm(A) == 0.0:
        raise InitializationError("The zero tensor has no nontrivial approximation")


def normalize_solution(A: DenseTensor, U: FactorSet):
    """
    Flip columns of U^(1) so lambda >= 0 and sort lambda nonincreasing, permuting
    every factor consistently.

    Returns:
        (factors, lambda)
    """
    lam = lambda_of(A, U)
    signs = np.where(lam < 0, -1.0, 1.0)
    matrices = U.matrices()
    matrices[0] = matrices[0] * signs
    order = np.argsort(-np.abs(lam), kind="stable")
    normalized = FactorSet.of([M[:, order] for M in matrices])
    return normalized, lambda_of(A, normalized)


def sweep(A: DenseTensor, U: FactorSet, params: SolverParameters, sweep_index: int, f_start: float):
    """
    One pass of Step 1 and Step 2.

    Returns:
        (next factor set, SweepRecord)
    """
    update = revised_mode_update if params.proximal_mode is ProximalMode.REVISED else apd_mode_update
    state = U.matrices()
    updates: List[ModeUpdate] = []
    for i in range(A.order):
        try:
            result = update(A, state, i, params)
        except NumericalError as e:
            if e.sweep is not None:
                raise
            raise NumericalError(e.reason, driver=e.driver, sweep=sweep_index, mode=i + 1) from e
        state[i] = result.factor
        updates.append(result)

    end = FactorSet.of(state)
    lam = updates[-1].lam_after
    mode_steps = tuple(float(np.linalg.norm(end[i] - U[i])) for i in range(A.order))
    step_norm = float(np.sqrt(sum(s * s for s in mode_steps)))

    nxt, truncated = end, ()
    if params.truncation_enabled:
        nxt, truncated = truncate(end, lam, params.kappa)
        if truncated:
            logger.info(
                f"Sweep {sweep_index}: truncated columns {list(truncated)} "
                f"(|lambda| = {np.abs(lam[list(truncated)])}), rank {U.rank} -> {nxt.rank}"
            )

    kept = np.delete(lam, list(truncated))
    record = SweepRecord(
        sweep=sweep_index,
        rank=U.rank,
        f_start=f_start,
        f_value=float(np.dot(kept, kept)),
        lam=np.array(lam),
        step_norm=step_norm,
        mode_step_norms=mode_steps,
        sigma_min=tuple(u.sigma_min for u in updates),
        proximal_flags=tuple(u.proximal for u in updates),
        revised_flags=tuple(u.case is UpdateCase.REVISED_FLIP for u in updates),
        substep_f=tuple(float(np.dot(u.lam_after, u.lam_after)) for u in updates),
        lambda_products=tuple(float(np.dot(u.lam_after, u.lam_before)) for u in updates),
        truncated=truncated,
        kkt_residual=float(np.linalg.norm(kkt_mode_residuals(A, nxt))),
        start_factors=U if params.keep_snapshots else None,
        end_factors=end if params.keep_snapshots else None,
    )
    return nxt, record


def run(A: DenseTensor, r: int, config: Optional[SolverConfig] = None) -> Solution:
    """
    Approximate A by an orthogonally decomposable tensor of rank <= r.

    Args:
        A: Input tensor, k >= 3, nonzero
        r: Target rank, 1 <= r <= min n_i
        config: Solver settings (defaults when omitted)

    Returns:
        Solution with normalized lambda and the full sweep trace

    Raises:
        DimensionMismatchError: If k < 3 or r is out of range
        InitializationError: If A is zero or no start with f > 0 exists
        ConfigurationException: If thresholds are inconsistent with the start
        NumericalError: If an SVD fails
    """
    config = config or SolverConfig()
    _validate_problem(A, r)
    started = time.perf_counter()

    U = init_factors(A, r, config.init, config.seed, config.init_stream)
    f0 = objective_f(A, U)
    params = config.resolve(norm(A) ** 2, f0, r)
    logger.info(
        f"iAPD start: dims={A.dims}, r={r}, mode={params.proximal_mode.value}, "
        f"eps={params.epsilon:.3e}, kappa={params.kappa:.3e}, f0={f0:.6e}"
    )

    records: List[SweepRecord] = []
    f_current = f0
    reason = TerminationReason.MAX_SWEEPS
    for p in range(1, params.max_sweeps + 1):
        U, record = sweep(A, U, params, p, f_current)
        records.append(record)
        f_current = record.f_value
        logger.debug(
            f"Sweep {p}: f={record.f_value:.12e}, step={record.step_norm:.3e}, "
            f"kkt={record.kkt_residual:.3e}, prox={record.proximal_bitmask:b}"
        )
        if (
            not record.is_truncation
            and record.step_norm <= params.step_tol
            and record.kkt_residual <= params.kkt_tol
        ):
            reason = TerminationReason.TOLERANCE
            break

    if reason is TerminationReason.MAX_SWEEPS:
        logger.warning(
            f"iAPD stopped at max_sweeps={params.max_sweeps} without meeting tolerances "
            f"(step={records[-1].step_norm:.3e}, kkt={records[-1].kkt_residual:.3e})"
        )

    factors, lam = normalize_solution(A, U)
    residual = norm(A - assemble(factors, lam))
    trace = SweepTrace(dims=A.dims, params=params, records=tuple(records))
    logger.info(
        f"iAPD done: {reason.value} after {len(records)} sweeps, rank {factors.rank}, "
        f"residual={residual:.6e} ({time.perf_counter() - started:.3f}s)"
    )
    return Solution(factors=factors, lam=lam, residual=residual, trace=trace, termination_reason=reason)
