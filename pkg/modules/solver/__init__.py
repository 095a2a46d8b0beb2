"""
Solver module.

The iAPD method for low-rank orthogonal tensor approximation, with the classic
and revised proximal corrections, truncation, and plain APD.

Usage:
    from modules.solver import SolverConfig, run

    solution = run(A, r=2, config=SolverConfig(proximal_mode="revised"))
    print(solution.to_summary())
"""

from modules.solver.config import SolverConfig, default_epsilon, kappa_upper_bound
from modules.solver.iapd import normalize_solution, run, sweep
from modules.solver.initialization import hosvd_factors, init_factors, random_factors
from modules.solver.types import (
    FactorSet,
    InitStrategy,
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
    ModeMatrices,
    apd_mode_update,
    kkt_mode_residuals,
    lambda_of,
    mode_matrices,
    objective_f,
    revised_mode_update,
    truncate,
)

__all__ = [
    'FactorSet',
    'InitStrategy',
    'ModeMatrices',
    'ModeUpdate',
    'ProximalMode',
    'Solution',
    'SolverConfig',
    'SolverParameters',
    'SweepRecord',
    'SweepTrace',
    'TerminationReason',
    'UpdateCase',
    'default_epsilon',
    'kappa_upper_bound',
    'lambda_of',
    'objective_f',
    'mode_matrices',
    'kkt_mode_residuals',
    'apd_mode_update',
    'revised_mode_update',
    'truncate',
    'init_factors',
    'hosvd_factors',
    'random_factors',
    'normalize_solution',
    'sweep',
    'run',
]
