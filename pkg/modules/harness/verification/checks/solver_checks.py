"""
Solver checks.

Contains checks that run the solver on seeded instances and audit the traces:
- exact-recovery: odeco inputs are recovered to high accuracy
- sufficient-decrease: per-sweep and per-substep gain bounds
- monotonicity: truncation budget, truncation firing on defective-rank inputs
- subdiff-bound: subgradient norm bounded by the step norm
- kkt-limit: tolerance-terminated runs end at KKT points
- apd-reduction: proximal corrections die out on odeco inputs
- default-kappa: which true components the default truncation threshold removes
"""

import dataclasses
import time
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from modules.diagnostics import (
    SUBDIFF_CONVENTION,
    kkt_residual,
    monotonicity_audit,
    positivity_chain_audit,
    recovery_error,
    subdiff_bound_audit,
    substep_decrease_audit,
    sufficient_decrease_audit,
)
from modules.harness.experiment import tail_proximal_fraction
from modules.harness.generators import GeneratedTensor, GeneratorKind, GeneratorSpec, generate_tensor
from modules.harness.verification.core.base import BaseCheck, CheckResult
from modules.harness.verification.core.registry import register_check
from modules.solver import ProximalMode, Solution, SolverConfig, TerminationReason, objective_f, run, sweep
from modules.tensor_core import norm


class SolverCheck(BaseCheck):
    """
    Base for checks that generate tensors and run the solver.

    Common params:
        solver: SolverConfig overrides applied to every run
    """

    # defaults applied under params.solver; subclasses override
    solver_defaults: Dict[str, Any] = {}

    def instance(self, s: int, kind: GeneratorKind, dims: Sequence[int],
                 true_rank: Optional[int] = None, noise: float = 0.0,
                 lambdas: Optional[List[float]] = None) -> GeneratedTensor:
        spec = GeneratorSpec(
            kind=kind, dims=list(dims), true_rank=true_rank, noise=noise, seed=self.seed, lambdas=lambdas
        )
        return generate_tensor(spec, self.stream_key, s)

    def solver_config(self, **overrides: Any) -> SolverConfig:
        return SolverConfig.model_validate({**self.solver_defaults, **self.param('solver', {}), **overrides})

    def solve(self, generated: GeneratedTensor, r: int, **overrides: Any) -> Solution:
        return run(generated.tensor, r, self.solver_config(**overrides))

    def truncation_note(self) -> str:
        return "" if self.solver_config().truncation_enabled else " (truncation off)"


@register_check("exact-recovery")
class ExactRecoveryCheck(SolverCheck):
    """
    Odeco inputs at their true rank: residual, lambda and subspace errors near zero.

    Truncation is off by default: the default kappa exceeds the smallest true
    lambda whenever the lambdas are spread widely enough.

    Configuration:
        params:
          instances: 50
          shapes: [[4, 4, 4], [5, 4, 3]]
          ranks: [2, 3]
          max_seconds: 10
    """

    solver_defaults = {'truncation_enabled': False}

    def run(self) -> CheckResult:
        instances = self.param('instances', 50)
        shapes = self.param('shapes', [[4, 4, 4], [5, 4, 3]])
        ranks = self.param('ranks', [2, 3])
        residual_tol = self.param('residual_tol', 1e-8)
        lambda_tol = self.param('lambda_tol', 1e-8)
        subspace_tol = self.param('subspace_tol', 1e-7)
        max_seconds = self.param('max_seconds', 10.0)

        failures = []
        started = time.perf_counter()
        for s in range(instances):
            dims = shapes[s % len(shapes)]
            r = ranks[(s // len(shapes)) % len(ranks)]
            generated = self.instance(s, GeneratorKind.ODECO_EXACT, dims, true_rank=r)
            sol = self.solve(generated, r)
            rec = recovery_error(sol, generated.truth)
            if sol.residual > residual_tol or rec.lambda_error > lambda_tol or rec.subspace_error > subspace_tol:
                failures.append({
                    'instance': s, 'dims': dims, 'rank': r, 'residual': sol.residual,
                    **rec.to_dict(),
                })
        elapsed = time.perf_counter() - started

        passed = not failures and elapsed <= max_seconds
        message = f"{len(failures)}/{instances} instances not recovered in {elapsed:.2f}s{self.truncation_note()}"
        if elapsed > max_seconds:
            message += f" (time limit {max_seconds}s exceeded)"
        return self._create_result(
            passed=passed, message=message, instances=instances, failures=failures,
            metadata={'elapsed_seconds': elapsed},
        )


@register_check("sufficient-decrease")
class SufficientDecreaseCheck(SolverCheck):
    """
    Every non-truncation sweep gains at least c/2 times the squared step, for
    c = epsilon (classic) and c = min(epsilon, tau - epsilon) (revised).

    params.constant_scale multiplies epsilon and tau inside the audit only; a
    large value turns this into a negative control that must fail.
    """

    def run(self) -> CheckResult:
        instances = self.param('instances', 50)
        dims = self.param('dims', [4, 4, 4])
        rank = self.param('rank', 2)
        noise = self.param('noise', 0.1)
        kinds = [GeneratorKind(k) for k in self.param('kinds', ['gaussian', 'odeco_noisy'])]
        modes = [ProximalMode(m) for m in self.param('modes', ['classic', 'revised'])]
        scale = float(self.param('constant_scale', 1.0))
        slack = self.param('slack', 1e-9)

        failures = []
        runs = 0
        for s in range(instances):
            kind = kinds[s % len(kinds)]
            true_rank = None if kind is GeneratorKind.GAUSSIAN else rank
            generated = self.instance(s, kind, dims, true_rank=true_rank, noise=noise)
            for mode in modes:
                sol = self.solve(generated, rank, proximal_mode=mode)
                runs += 1
                params = sol.trace.params
                if scale != 1.0:
                    tau = params.tau * scale if params.tau is not None else None
                    params = dataclasses.replace(params, epsilon=params.epsilon * scale, tau=tau)
                violations = (
                    sufficient_decrease_audit(sol.trace, params, slack)
                    + substep_decrease_audit(sol.trace, params, slack)
                )
                if violations:
                    failures.append({
                        'instance': s, 'kind': kind.value, 'mode': mode.value,
                        'violations': len(violations), 'first': violations[0].to_dict(),
                    })
        return self._create_result(
            passed=not failures,
            message=f"{len(failures)}/{runs} runs with sufficient decrease violations",
            instances=runs,
            failures=failures,
            metadata={'constant_scale': scale},
        )


@register_check("monotonicity")
class MonotonicityCheck(SolverCheck):
    """
    Defective-rank inputs: truncation fires, the loss stays within |J| kappa^2,
    f never decreases after the last truncation, and the final rank is the
    rank of the odeco part.

    Lambdas are drawn from params.lambda_range so that every true component sits
    above the default kappa.
    """

    def run(self) -> CheckResult:
        instances = self.param('instances', 20)
        dims = self.param('dims', [4, 4, 4])
        rank = self.param('rank', 3)
        low, high = self.param('lambda_range', [2.0, 4.0])

        failures = []
        truncated_runs = 0
        for s in range(instances):
            lambdas = sorted(self.rng(s, 1).uniform(low, high, size=rank - 1).tolist(), reverse=True)
            generated = self.instance(s, GeneratorKind.DEFECTIVE_RANK, dims, true_rank=rank, lambdas=lambdas)
            sol = self.solve(generated, rank)
            audit = monotonicity_audit(sol.trace)
            chain = positivity_chain_audit(sol.trace)
            fired = bool(sol.trace.truncation_sweeps())
            truncated_runs += fired
            if not (audit.passed and not chain and fired and sol.rank == rank - 1):
                failures.append({
                    'instance': s, 'final_rank': sol.rank, 'truncated': fired,
                    'positivity_failures': len(chain), **audit.to_dict(),
                })
        return self._create_result(
            passed=not failures,
            message=f"{len(failures)}/{instances} defective-rank runs failed; truncation fired on {truncated_runs}",
            instances=instances,
            failures=failures,
            metadata={'truncation_frequency': truncated_runs / instances if instances else 0.0},
        )


@register_check("subdiff-bound")
class SubdiffBoundCheck(SolverCheck):
    def run(self) -> CheckResult:
        instances = self.param('instances', 20)
        dims = self.param('dims', [4, 4, 4])
        rank = self.param('rank', 2)
        slack = self.param('slack', 1e-9)

        failures = []
        max_ratio = 0.0
        for s in range(instances):
            generated = self.instance(s, GeneratorKind.GAUSSIAN, dims)
            sol = self.solve(generated, rank, keep_snapshots=True)
            audit = subdiff_bound_audit(generated.tensor, sol.trace, slack)
            max_ratio = max(max_ratio, audit.max_ratio)
            if not audit.passed:
                failures.append({'instance': s, 'violations': len(audit.violations), 'max_ratio': audit.max_ratio})
        return self._create_result(
            passed=not failures,
            message=(
                f"{len(failures)}/{instances} runs broke the subgradient bound "
                f"(max ratio {max_ratio:.3e}, {SUBDIFF_CONVENTION})"
            ),
            instances=instances,
            failures=failures,
            metadata={'max_ratio': max_ratio, 'convention': SUBDIFF_CONVENTION},
        )


@register_check("kkt-limit")
class KktLimitCheck(SolverCheck):
    """
    Tolerance-terminated runs end at KKT points with symmetric multipliers.
    Also checks that exact odeco factors are fixed points of a sweep.
    """

    def run(self) -> CheckResult:
        instances = self.param('instances', 20)
        dims = self.param('dims', [4, 4, 4])
        rank = self.param('rank', 2)
        tol = self.param('tol', 1e-8)
        fixed_point_tol = self.param('fixed_point_tol', 1e-10)

        failures: List[Dict[str, Any]] = []
        converged = 0
        for s in range(instances):
            generated = self.instance(s, GeneratorKind.GAUSSIAN, dims)
            sol = self.solve(generated, rank)
            if sol.termination_reason is not TerminationReason.TOLERANCE:
                continue
            converged += 1
            report = kkt_residual(generated.tensor, sol.factors)
            if report.total > tol or report.max_symmetry_defect > tol:
                failures.append({'instance': s, **report.to_dict()})

        for s in range(instances):
            generated = self.instance(s, GeneratorKind.ODECO_EXACT, dims, true_rank=rank)
            A, U = generated.tensor, generated.truth.factors
            report = kkt_residual(A, U)
            f = objective_f(A, U)
            params = self.solver_config(truncation_enabled=False).resolve(norm(A) ** 2, f, rank)
            _, record = sweep(A, U, params, 1, f)
            if report.total > fixed_point_tol or record.step_norm > fixed_point_tol:
                failures.append({
                    'instance': s, 'fixed_point': True, 'total': report.total, 'step_norm': record.step_norm,
                })

        return self._create_result(
            passed=not failures,
            message=(
                f"{len(failures)} KKT failures ({converged}/{instances} runs converged, "
                f"{instances} fixed points with truncation off)"
            ),
            instances=2 * instances,
            failures=failures,
            metadata={'converged_runs': converged},
        )


@register_check("apd-reduction")
class ApdReductionCheck(SolverCheck):
    """On odeco inputs, no proximal corrections in the final half of the sweeps for most runs."""

    solver_defaults = {'truncation_enabled': False}

    def run(self) -> CheckResult:
        instances = self.param('instances', 40)
        dims = self.param('dims', [4, 4, 4])
        ranks = self.param('ranks', [2, 3])
        required = self.param('required_fraction', 0.95)

        failures = []
        for s in range(instances):
            r = ranks[s % len(ranks)]
            generated = self.instance(s, GeneratorKind.ODECO_EXACT, dims, true_rank=r)
            sol = self.solve(generated, r)
            fraction = tail_proximal_fraction(sol)
            if fraction > 0:
                failures.append({'instance': s, 'rank': r, 'tail_proximal_fraction': fraction})
        clean = (instances - len(failures)) / instances if instances else 1.0
        return self._create_result(
            passed=clean >= required,
            message=(
                f"{clean:.1%} of runs free of proximal corrections in the final half "
                f"(need {required:.0%}){self.truncation_note()}"
            ),
            instances=instances,
            failures=failures,
            metadata={'clean_fraction': clean, 'proximal_tail_runs': [f['instance'] for f in failures]},
        )


@register_check("default-kappa")
class DefaultKappaCheck(SolverCheck):
    """
    What the default kappa = 0.5 sqrt(f0 / r) costs on the generator's own lambda
    distribution (uniform on [0.5, 5]), with truncation on.

    HOSVD starts exactly at the truth on these inputs, so the first sweep removes
    precisely the true components with |lambda| < kappa (and the zero column of
    defective_rank inputs). The check passes when every run ends at that
    predicted rank with residual sqrt(sum of the removed lambda^2); the share of
    runs that lose a true component is reported, not gated.
    """

    def run(self) -> CheckResult:
        instances = self.param('instances', 50)
        dims = self.param('dims', [4, 4, 4])
        rank = self.param('rank', 3)
        kinds = [GeneratorKind(k) for k in self.param('kinds', ['odeco_exact', 'defective_rank'])]
        residual_tol = self.param('residual_tol', 1e-8)

        failures = []
        lossy = {kind.value: 0 for kind in kinds}
        runs = 0
        for s in range(instances):
            for kind in kinds:
                generated = self.instance(s, kind, dims, true_rank=rank)
                sol = self.solve(generated, rank)
                runs += 1
                true_lam = np.abs(np.asarray(generated.truth.lam))
                kappa = sol.trace.params.kappa
                lost = true_lam[true_lam < kappa]
                expected_rank = int(np.count_nonzero(true_lam >= kappa))
                expected_residual = float(np.sqrt(np.sum(lost ** 2)))
                lossy[kind.value] += bool(lost.size)
                if sol.rank != expected_rank or abs(sol.residual - expected_residual) > residual_tol:
                    failures.append({
                        'instance': s, 'kind': kind.value, 'kappa': kappa,
                        'true_lambda': true_lam.tolist(), 'final_rank': sol.rank,
                        'expected_rank': expected_rank, 'residual': sol.residual,
                        'expected_residual': expected_residual,
                    })
        loss_rate = {kind: count / instances for kind, count in lossy.items()} if instances else {}
        rates = ", ".join(f"{kind} {rate:.0%}" for kind, rate in loss_rate.items())
        return self._create_result(
            passed=not failures,
            message=(
                f"{len(failures)}/{runs} runs off the predicted rank; default kappa removed "
                f"a true component in: {rates} (set kappa or disable truncation to keep them)"
            ),
            instances=runs,
            failures=failures,
            metadata={'true_component_loss_rate': loss_rate},
        )
