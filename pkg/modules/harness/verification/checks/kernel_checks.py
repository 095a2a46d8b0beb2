"""
Matrix kernel checks.

Contains checks for the polar and Stiefel inequalities:
- polar-error-bound: error reformulation equality and the sigma_min Frobenius bound
- polar-argmax: the polar factor maximizes <Q, M> over orthonormal Q
- principal-angles: cos(theta) = sigma(U^T V), cross-checked against scipy
- complement-angles: nonzero angles of subspaces and of their complements agree
- trace-inequality, stiefel-distance, completion-bound
- tangent-normal-split
"""

import numpy as np
import scipy.linalg

from modules.harness.verification.core.base import BaseCheck, CheckResult
from modules.harness.verification.core.registry import register_check
from modules.matrix_kernels import (
    complete_orthonormal,
    completion_bound_gap,
    nonzero_angles,
    normal_project,
    polar,
    polar_argmax_gap,
    polar_error_gap,
    principal_angles,
    random_orthonormal,
    stiefel_distance_gap,
    sym,
    tangent_project,
    trace_inequality_gap,
)


def _nearby_orthonormal(U: np.ndarray, rng: np.random.Generator, scale: float) -> np.ndarray:
    return polar(U + scale * rng.standard_normal(U.shape)).U.matrix


@register_check("polar-error-bound")
class PolarErrorBoundCheck(BaseCheck):
    """
    ||B - QC||^2 - ||B - WC||^2 = ||(W - Q) sqrt(H)||^2 and, for full-rank
    A = B C^T, the left side is at least sigma_min(A) ||W - Q||^2.

    Configuration:
        params:
          instances: 500
          m: 4
          n: 3
          p: 5
    """

    def run(self) -> CheckResult:
        instances = self.param('instances', 500)
        m, n, p = self.param('m', 4), self.param('n', 3), self.param('p', 5)
        eq_tol, bound_tol = self.param('equality_tol', 1e-8), self.param('bound_tol', 1e-10)
        failures = []
        for s in range(instances):
            rng = self.rng(s)
            B = rng.standard_normal((m, p))
            C = rng.standard_normal((n, p))
            Q = random_orthonormal(m, n, rng).matrix
            gap = polar_error_gap(B, C, Q)
            if not (gap.equality_holds(eq_tol) and gap.bound_holds(bound_tol)):
                failures.append({'instance': s, 'lhs': gap.lhs, 'rhs_eq': gap.rhs_eq, 'rhs_bound': gap.rhs_bound})
        return self._create_result(
            passed=not failures,
            message=f"{len(failures)}/{instances} polar error instances violated",
            instances=instances,
            failures=failures,
        )


@register_check("polar-argmax")
class PolarArgmaxCheck(BaseCheck):
    def run(self) -> CheckResult:
        instances = self.param('instances', 200)
        n, r = self.param('n', 5), self.param('r', 3)
        tol = self.param('tol', 1e-10)
        failures = []
        for s in range(instances):
            rng = self.rng(s)
            M = rng.standard_normal((n, r))
            Q = random_orthonormal(n, r, rng).matrix
            gap = polar_argmax_gap(M, Q)
            if gap < -tol:
                failures.append({'instance': s, 'gap': gap})
        return self._create_result(
            passed=not failures,
            message=f"{len(failures)}/{instances} orthonormal Q beat the polar factor",
            instances=instances,
            failures=failures,
        )


@register_check("principal-angles")
class PrincipalAnglesCheck(BaseCheck):
    """cos of the principal angles equals the singular values of U^T V; angles agree with scipy."""

    def run(self) -> CheckResult:
        instances = self.param('instances', 200)
        n, r = self.param('n', 6), self.param('r', 3)
        tol = self.param('tol', 1e-8)
        failures = []
        for s in range(instances):
            rng = self.rng(s)
            U = random_orthonormal(n, r, rng).matrix
            V = random_orthonormal(n, r, rng).matrix
            theta = principal_angles(U, V)
            sigma = np.linalg.svd(U.T @ V, compute_uv=False)
            reference = np.sort(scipy.linalg.subspace_angles(U, V))
            cos_err = float(np.max(np.abs(np.cos(theta) - sigma)))
            ref_err = float(np.max(np.abs(np.cos(theta) - np.cos(reference))))
            if cos_err > tol or ref_err > tol:
                failures.append({'instance': s, 'cos_error': cos_err, 'reference_error': ref_err})
        return self._create_result(
            passed=not failures,
            message=f"{len(failures)}/{instances} angle sets disagreed",
            instances=instances,
            failures=failures,
        )


@register_check("complement-angles")
class ComplementAnglesCheck(BaseCheck):
    """The nonzero principal angles of span(U), span(V) and of their orthogonal complements coincide."""

    def run(self) -> CheckResult:
        instances = self.param('instances', 200)
        n, r = self.param('n', 7), self.param('r', 3)
        zero_tol, tol = self.param('zero_tol', 1e-6), self.param('tol', 1e-8)
        failures = []
        for s in range(instances):
            rng = self.rng(s)
            U = random_orthonormal(n, r, rng)
            V = random_orthonormal(n, r, rng)
            inner = nonzero_angles(principal_angles(U, V), zero_tol)
            outer = nonzero_angles(
                principal_angles(complete_orthonormal(U), complete_orthonormal(V)), zero_tol
            )
            if inner.size != outer.size or (inner.size and np.max(np.abs(inner - outer)) > tol):
                failures.append({'instance': s, 'angles': inner.tolist(), 'complement_angles': outer.tolist()})
        return self._create_result(
            passed=not failures,
            message=f"{len(failures)}/{instances} complement angle sets disagreed",
            instances=instances,
            failures=failures,
        )


class _PairGapCheck(BaseCheck):
    """Shared loop for inequalities on pairs of orthonormal matrices; half the pairs are close."""

    gap_name = "gap"

    def gap(self, U: np.ndarray, V: np.ndarray) -> float:
        raise NotImplementedError

    def pair(self, rng: np.random.Generator, s: int):
        n, r = self.param('n', 6), self.param('r', 3)
        U = random_orthonormal(n, r, rng).matrix
        if s % 2:
            return U, _nearby_orthonormal(U, rng, self.param('perturbation', 0.1))
        return U, random_orthonormal(n, r, rng).matrix

    def run(self) -> CheckResult:
        instances = self.param('instances', 200)
        tol = self.param('tol', 1e-8)
        failures = []
        for s in range(instances):
            U, V = self.pair(self.rng(s), s)
            value = self.gap(U, V)
            if value < -tol:
                failures.append({'instance': s, self.gap_name: value})
        return self._create_result(
            passed=not failures,
            message=f"{len(failures)}/{instances} instances with negative {self.gap_name}",
            instances=instances,
            failures=failures,
        )


@register_check("trace-inequality")
class TraceInequalityCheck(_PairGapCheck):
    """<U, V> <= sum_j sigma_j(U^T V)."""

    gap_name = "trace_gap"

    def gap(self, U, V):
        return trace_inequality_gap(U, V)


@register_check("stiefel-distance")
class StiefelDistanceCheck(_PairGapCheck):
    """||U^T V - I||^2 <= ||U - V||^2."""

    gap_name = "distance_gap"

    def gap(self, U, V):
        return stiefel_distance_gap(U, V)


@register_check("completion-bound")
class CompletionBoundCheck(_PairGapCheck):
    """||[U W] - V||^2 <= 2 ||U - V_1||^2 for the aligned completion W."""

    gap_name = "completion_gap"

    def pair(self, rng, s):
        n, r = self.param('n', 6), self.param('r', 3)
        V = random_orthonormal(n, n, rng).matrix
        if s % 2:
            return _nearby_orthonormal(V[:, :r], rng, self.param('perturbation', 0.1)), V
        return random_orthonormal(n, r, rng).matrix, V

    def gap(self, U, V):
        return completion_bound_gap(U, V)


@register_check("tangent-normal-split")
class TangentNormalSplitCheck(BaseCheck):
    """Tangent + normal parts rebuild B; A^T(tangent part) is skew."""

    def run(self) -> CheckResult:
        instances = self.param('instances', 200)
        n, r = self.param('n', 6), self.param('r', 3)
        tol = self.param('tol', 1e-10)
        failures = []
        for s in range(instances):
            rng = self.rng(s)
            A = random_orthonormal(n, r, rng).matrix
            B = rng.standard_normal((n, r))
            T = tangent_project(A, B)
            split_err = float(np.linalg.norm(T + normal_project(A, B) - B))
            skew_err = float(np.linalg.norm(sym(A.T @ T)))
            if split_err > tol or skew_err > tol:
                failures.append({'instance': s, 'split_error': split_err, 'skew_error': skew_err})
        return self._create_result(
            passed=not failures,
            message=f"{len(failures)}/{instances} tangent/normal splits failed",
            instances=instances,
            failures=failures,
        )
