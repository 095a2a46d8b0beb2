"""
Diagnostics module.

Optimality checks, trace audits, rate fitting and closed-form quantities used to
verify solver runs.
"""

from modules.diagnostics.audits import (
    DecreaseViolation,
    MonotonicityAudit,
    SubdiffAudit,
    SUBDIFF_CONVENTION,
    SubdiffAuditEntry,
    monotonicity_audit,
    positivity_chain_audit,
    subdiff_bound_audit,
    substep_decrease_audit,
    sufficient_decrease_audit,
)
from modules.diagnostics.formulas import (
    LojasiewiczExponent,
    lojasiewicz_exponent,
    manifold_dim,
    max_safe_rank,
    sufficient_condition_equal_dims,
    truncation_safe,
)
from modules.diagnostics.kkt import (
    KktReport,
    RiemannianGradient,
    kkt_residual,
    objective_g,
    reduce_kkt_point,
    riemannian_grad_g,
)
from modules.diagnostics.rates import RateReport, estimate_f_star, fit_linear_rate
from modules.diagnostics.recovery import RecoveryError, recovery_error

__all__ = [
    'KktReport',
    'RiemannianGradient',
    'kkt_residual',
    'riemannian_grad_g',
    'objective_g',
    'reduce_kkt_point',
    'DecreaseViolation',
    'MonotonicityAudit',
    'SubdiffAudit',
    'SUBDIFF_CONVENTION',
    'SubdiffAuditEntry',
    'sufficient_decrease_audit',
    'substep_decrease_audit',
    'monotonicity_audit',
    'positivity_chain_audit',
    'subdiff_bound_audit',
    'RateReport',
    'estimate_f_star',
    'fit_linear_rate',
    'LojasiewiczExponent',
    'lojasiewicz_exponent',
    'manifold_dim',
    'truncation_safe',
    'sufficient_condition_equal_dims',
    'max_safe_rank',
    'RecoveryError',
    'recovery_error',
]
