"""
Diagnostics checks.

Contains checks of the diagnostics themselves:
- linear-rate: empirical linear rate on converged generic runs
- rate-calibration: the rate fit recovers the ratio of synthetic geometric gaps
- gradient-check: Riemannian gradient against central finite differences
- kkt-reduction: removing zero-lambda columns keeps a KKT point
- formula-utilities: closed-form quantities against hand evaluations
"""

import math

import numpy as np

from modules.diagnostics import (
    fit_linear_rate,
    kkt_residual,
    lojasiewicz_exponent,
    manifold_dim,
    max_safe_rank,
    objective_g,
    reduce_kkt_point,
    riemannian_grad_g,
    sufficient_condition_equal_dims,
    truncation_safe,
)
from modules.harness.generators import GeneratorKind
from modules.harness.verification.checks.solver_checks import SolverCheck
from modules.harness.verification.core.base import BaseCheck, CheckResult
from modules.harness.verification.core.registry import register_check
from modules.matrix_kernels import complete_orthonormal, random_orthonormal, sym, tangent_project
from modules.solver import FactorSet, TerminationReason, lambda_of
from modules.tensor_core import DenseTensor
from shared.core.exceptions import InsufficientDataError


@register_check("linear-rate")
class LinearRateCheck(SolverCheck):
    """
    Converged generic runs show a linear rate: rho < 1 with a clean log-linear fit.

    Runs stopped at max_sweeps are not fitted.
    """

    def run(self) -> CheckResult:
        instances = self.param('instances', 20)
        dims = self.param('dims', [5, 5, 5])
        rank = self.param('rank', 2)
        max_residual = self.param('max_fit_residual', 0.1)

        failures = []
        rhos = []
        skipped = 0
        converged = 0
        for s in range(instances):
            generated = self.instance(s, GeneratorKind.GAUSSIAN, dims)
            sol = self.solve(generated, rank)
            if sol.termination_reason is not TerminationReason.TOLERANCE:
                continue
            converged += 1
            try:
                report = fit_linear_rate(sol)
            except InsufficientDataError:
                skipped += 1
                continue
            rhos.append(report.rho)
            if not (report.rho < 1.0 and report.fit_residual < max_residual):
                failures.append({'instance': s, **report.to_dict()})
        return self._create_result(
            passed=not failures and converged > 0,
            message=f"{len(failures)}/{converged} converged runs without a clean linear rate",
            instances=instances,
            failures=failures,
            metadata={
                'converged_runs': converged,
                'too_short': skipped,
                'rho': rhos,
                'median_rho': float(np.median(rhos)) if rhos else None,
            },
        )


@register_check("rate-calibration")
class RateCalibrationCheck(BaseCheck):
    """f_p = f* - rho^p must give back rho."""

    def run(self) -> CheckResult:
        ratios = self.param('ratios', [0.5, 0.8, 0.9])
        tol = self.param('tol', 1e-6)
        f_star = self.param('f_star', 1.0)
        smallest_gap = self.param('smallest_gap', 1e-6)

        failures = []
        for rho in ratios:
            points = max(20, math.ceil(math.log(smallest_gap) / math.log(rho)) + 1)
            f = f_star - rho ** np.arange(points)
            report = fit_linear_rate(f)
            if abs(report.rho - rho) > tol:
                failures.append({'rho': rho, 'fitted': report.rho, 'points': points})
        return self._create_result(
            passed=not failures,
            message=f"{len(failures)}/{len(ratios)} synthetic ratios not recovered",
            instances=len(ratios),
            failures=failures,
        )


@register_check("gradient-check")
class GradientCheck(BaseCheck):
    """
    <grad g, (D, y)> against the central difference of g along (D, y) for
    tangent D; each mode part must have a skew Gram with its factor.
    """

    def run(self) -> CheckResult:
        points = self.param('points', 20)
        directions = self.param('directions', 20)
        dims = self.param('dims', [3, 4, 5])
        rank = self.param('rank', 2)
        h = self.param('step', 1e-5)
        rel_tol = self.param('rel_tol', 1e-5)
        skew_tol = self.param('skew_tol', 1e-10)

        failures = []
        for s in range(points):
            rng = self.rng(s)
            A = DenseTensor(rng.standard_normal(tuple(dims)))
            U = [random_orthonormal(n, rank, rng).matrix for n in dims]
            x = rng.standard_normal(rank)
            grad = riemannian_grad_g(A, U, x)

            skew_err = max(float(np.linalg.norm(sym(Ui.T @ G))) for Ui, G in zip(U, grad.modes))
            x_zero = float(np.linalg.norm(riemannian_grad_g(A, U, lambda_of(A, U)).x_part))
            if skew_err > skew_tol or x_zero > skew_tol:
                failures.append({'point': s, 'skew_error': skew_err, 'x_part_at_lambda': x_zero})

            for d in range(directions):
                D = [tangent_project(Ui, rng.standard_normal(Ui.shape)) for Ui in U]
                y = rng.standard_normal(rank)
                plus = objective_g(A, [Ui + h * Di for Ui, Di in zip(U, D)], x + h * y)
                minus = objective_g(A, [Ui - h * Di for Ui, Di in zip(U, D)], x - h * y)
                numeric = (plus - minus) / (2.0 * h)
                analytic = grad.inner(D, y)
                error = abs(numeric - analytic) / max(1.0, abs(analytic))
                if error > rel_tol:
                    failures.append({'point': s, 'direction': d, 'numeric': numeric, 'analytic': analytic})
        return self._create_result(
            passed=not failures,
            message=f"{len(failures)} gradient mismatches over {points} points x {directions} directions",
            instances=points * directions,
            failures=failures,
        )


@register_check("kkt-reduction")
class KktReductionCheck(SolverCheck):
    """
    Exact odeco factors padded with one orthogonal column form a non-primitive
    KKT point; reducing it removes that column and leaves a primitive KKT point.
    """

    def run(self) -> CheckResult:
        instances = self.param('instances', 20)
        dims = self.param('dims', [4, 4, 4])
        rank = self.param('rank', 2)
        tol = self.param('tol', 1e-10)

        failures = []
        for s in range(instances):
            generated = self.instance(s, GeneratorKind.ODECO_EXACT, dims, true_rank=rank)
            A, truth = generated.tensor, generated.truth.factors
            padded = FactorSet.of([
                np.hstack([T, complete_orthonormal(T).matrix[:, :1]]) for T in truth
            ])
            before = kkt_residual(A, padded)
            reduced, removed = reduce_kkt_point(A, padded)
            after = kkt_residual(A, reduced)
            ok = (
                before.total <= tol and not before.primitive
                and removed == [rank]
                and after.total <= tol and after.primitive
            )
            if not ok:
                failures.append({
                    'instance': s, 'removed': removed,
                    'total_before': before.total, 'total_after': after.total,
                    'primitive_after': after.primitive,
                })
        return self._create_result(
            passed=not failures,
            message=f"{len(failures)}/{instances} KKT reductions failed",
            instances=instances,
            failures=failures,
        )


@register_check("formula-utilities")
class FormulaUtilitiesCheck(BaseCheck):
    """Hand-evaluated values plus scans over equal dimensions."""

    def run(self) -> CheckResult:
        max_n = self.param('max_n', 10)
        failures = []

        expectations = {
            'manifold_dim((2,2,2),1)': (manifold_dim((2, 2, 2), 1), 4),
            'manifold_dim((2,2,2),0)': (manifold_dim((2, 2, 2), 0), 0),
            'manifold_dim((3,3,3),2)': (manifold_dim((3, 3, 3), 2), 11),
            'truncation_safe((4,4,4),2)': (truncation_safe((4, 4, 4), 2), True),
            'truncation_safe((5,3,2),1)': (truncation_safe((5, 3, 2), 1), True),
            'lojasiewicz_exponent((2,2,2),1).N': (lojasiewicz_exponent((2, 2, 2), 1).N, 9),
            'lojasiewicz_exponent((2,2,2),1).triple': (lojasiewicz_exponent((2, 2, 2), 1).triple, (6, 15, 8)),
        }
        for name, (actual, expected) in expectations.items():
            if actual != expected:
                failures.append({'case': name, 'actual': actual, 'expected': expected})

        evaluated = len(expectations)
        for n in range(3, max_n + 1):
            bound = max_safe_rank(n, 3)
            previous_N = 0
            for r in range(1, n + 1):
                evaluated += 1
                sufficient = sufficient_condition_equal_dims(n, 3, r)
                if sufficient and not truncation_safe((n, n, n), r):
                    failures.append({'case': 'sufficient implies safe', 'n': n, 'r': r})
                if r <= bound and not sufficient:
                    failures.append({'case': 'rank bound implies sufficient', 'n': n, 'r': r, 'bound': bound})
                N = lojasiewicz_exponent((n, n, n), r).N
                if N <= previous_N:
                    failures.append({'case': 'N increasing in r', 'n': n, 'r': r})
                previous_N = N
        return self._create_result(
            passed=not failures,
            message=f"{len(failures)} formula mismatches",
            instances=evaluated,
            failures=failures,
        )
