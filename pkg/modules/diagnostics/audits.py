"""
Trace audits: sufficient decrease, monotonicity with the truncation budget, the
positivity chain and the subdifferential bound.

Every audit replays a SweepTrace; the solver itself never asserts.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from modules.solver import SolverParameters, SweepTrace, lambda_of, mode_matrices
from modules.tensor_core import DenseTensor, mode_contractions, norm
from shared.core.exceptions import TraceError
from shared.utils.logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_SLACK = 1e-9


@dataclass(frozen=True)
class DecreaseViolation:
    """f gain below c/2 times the squared step. mode is None for whole sweeps."""
    sweep: int
    gain: float
    required: float
    mode: Optional[int] = None

    @property
    def shortfall(self) -> float:
        return self.required - self.gain

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def sufficient_decrease_audit(trace: SweepTrace, params: Optional[SolverParameters] = None,
                              slack: float = DEFAULT_SLACK) -> List[DecreaseViolation]:
    """
    Check f(U_[p]) - f(U_[p-1]) >= c/2 ||U_[p] - U_[p-1]||^2 on every non-truncation sweep.

    c = epsilon (classic) or min(epsilon, tau - epsilon) (revised). Plain APD has
    no guarantee and is not audited.
    """
    params = params or trace.params
    c = params.decrease_constant
    if c is None:
        logger.debug("Plain APD trace: no sufficient decrease guarantee to audit")
        return []
    violations = []
    for rec in trace:
        if rec.is_truncation:
            continue
        gain = rec.f_value - rec.f_start
        required = 0.5 * c * rec.step_norm ** 2
        if gain < required - slack:
            violations.append(DecreaseViolation(sweep=rec.sweep, gain=gain, required=required))
    return violations


def substep_decrease_audit(trace: SweepTrace, params: Optional[SolverParameters] = None,
                           slack: float = DEFAULT_SLACK) -> List[DecreaseViolation]:
    """Per-mode form: f(U_{i,[p]}) - f(U_{i-1,[p]}) >= c/2 ||U^(i)_[p] - U^(i)_[p-1]||^2."""
    params = params or trace.params
    c = params.decrease_constant
    if c is None:
        return []
    violations = []
    for rec in trace:
        before = rec.f_start
        for i, (after, step) in enumerate(zip(rec.substep_f, rec.mode_step_norms)):
            gain = after - before
            required = 0.5 * c * step ** 2
            if gain < required - slack:
                violations.append(DecreaseViolation(sweep=rec.sweep, gain=gain, required=required, mode=i + 1))
            before = after
    return violations


@dataclass(frozen=True)
class MonotonicityAudit:
    decreasing_sweeps: List[int]
    budget_violations: List[int]
    truncation_loss: float
    loss_budget: float
    removed: int
    initial_rank: int

    @property
    def passed(self) -> bool:
        return (
            not self.decreasing_sweeps
            and not self.budget_violations
            and self.truncation_loss <= self.loss_budget + DEFAULT_SLACK
            and self.removed <= self.initial_rank
        )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["passed"] = self.passed
        return data


def monotonicity_audit(trace: SweepTrace, slack: float = DEFAULT_SLACK) -> MonotonicityAudit:
    """
    f nondecreasing after the last truncation; every truncation sweep loses at most
    |J| kappa^2; total truncation loss at most (removed count) kappa^2.
    """
    kappa_sq = trace.params.kappa ** 2
    last = trace.last_truncation_position()
    decreasing = [
        rec.sweep for rec in trace.records[last + 1:]
        if rec.f_value < rec.f_start - slack
    ]
    budget = [
        rec.sweep for rec in trace
        if rec.is_truncation and rec.f_value < rec.f_start - len(rec.truncated) * kappa_sq - slack
    ]
    loss = float(sum(rec.truncation_loss for rec in trace if rec.is_truncation))
    removed = trace.removed_count()
    return MonotonicityAudit(
        decreasing_sweeps=decreasing,
        budget_violations=budget,
        truncation_loss=loss,
        loss_budget=removed * kappa_sq,
        removed=removed,
        initial_rank=trace.params.initial_rank,
    )


def positivity_chain_audit(trace: SweepTrace) -> List[Dict[str, Any]]:
    """Substeps with sum_j lambda^i_j lambda^{i-1}_j <= 0 on non-truncation sweeps."""
    failures = []
    for rec in trace:
        if rec.is_truncation:
            continue
        for i, product in enumerate(rec.lambda_products):
            if not product > 0:
                failures.append({"sweep": rec.sweep, "mode": i + 1, "product": product})
    return failures


SUBDIFF_CONVENTION = "factor-2 gradient: ||W|| is doubled before the comparison"


@dataclass(frozen=True)
class SubdiffAuditEntry:
    sweep: int
    lhs: float        # ||W|| with W built from V Lambda
    lhs_eq_w: float   # the same with the factor-2 gradient convention; this one is gated
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs_eq_w / self.rhs if self.rhs > 0 else (0.0 if self.lhs_eq_w == 0 else math.inf)

    def violates(self, slack: float) -> bool:
        return self.lhs_eq_w > self.rhs + slack


@dataclass(frozen=True)
class SubdiffAudit:
    entries: List[SubdiffAuditEntry] = field(default_factory=list)
    slack: float = DEFAULT_SLACK

    @property
    def violations(self) -> List[SubdiffAuditEntry]:
        return [e for e in self.entries if e.violates(self.slack)]

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def max_ratio(self) -> float:
        """Tightness of the constant: largest lhs_eq_w / rhs seen."""
        return max((e.ratio for e in self.entries), default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "convention": SUBDIFF_CONVENTION,
            "audited_sweeps": len(self.entries),
            "max_ratio": self.max_ratio,
            "violations": [asdict(e) for e in self.violations],
        }


def subdiff_bound_audit(A: DenseTensor, trace: SweepTrace, slack: float = DEFAULT_SLACK) -> SubdiffAudit:
    """
    Replay each non-truncation sweep and bound the subgradient it produces.

    W^(i) = V^(i)Lambda at U_[p] - V^(i)Lambda^(i) at the mixed point
            - alpha (U^(i)_[p-1] - U^(i)_[p]),
    alpha = epsilon when mode i took a proximal correction, else 0. The audit
    passes when, with the factor-2 gradient convention,
    2||W||_F <= sqrt(k)(2 r sqrt(r) ||A||^2 + epsilon) ||U_[p] - U_[p-1]||_F.

    Raises:
        TraceError: If the trace was recorded without factor snapshots
    """
    k = A.order
    norm_sq = norm(A) ** 2
    eps = trace.params.epsilon
    entries = []
    for rec in trace:
        if rec.is_truncation:
            continue
        if rec.start_factors is None or rec.end_factors is None:
            raise TraceError(f"Sweep {rec.sweep} has no factor snapshots; rerun with keep_snapshots")
        prev, cur = rec.start_factors.matrices(), rec.end_factors.matrices()
        lam_full = lambda_of(A, cur)
        w_sq = 0.0
        for i in range(k):
            mixed = cur[:i] + prev[i:]
            X_mixed = mode_matrices(A, mixed, i).weighted
            X_full = mode_contractions(A, cur, i) * lam_full
            alpha = eps if rec.proximal_flags[i] else 0.0
            W = X_full - X_mixed - alpha * (prev[i] - cur[i])
            w_sq += float(np.linalg.norm(W) ** 2)
        lhs = math.sqrt(w_sq)
        r = rec.rank
        rhs = math.sqrt(k) * (2.0 * r * math.sqrt(r) * norm_sq + eps) * rec.step_norm
        entries.append(SubdiffAuditEntry(sweep=rec.sweep, lhs=lhs, lhs_eq_w=2.0 * lhs, rhs=rhs))
    audit = SubdiffAudit(entries=entries, slack=slack)
    logger.debug(f"Subdifferential audit: {len(entries)} sweeps, max ratio {audit.max_ratio:.3e}")
    return audit
