"""
End-to-end solver runs on seeded tensors, audited through the diagnostics.
"""

import dataclasses

import numpy as np
import pandas as pd
import pytest

from modules.diagnostics import (
    fit_linear_rate,
    kkt_residual,
    monotonicity_audit,
    positivity_chain_audit,
    recovery_error,
    subdiff_bound_audit,
    sufficient_decrease_audit,
)
from modules.harness.experiment import audit_solution, tail_proximal_fraction
from modules.harness.generators import GeneratorSpec, generate_tensor
from modules.harness.trace_export import trace_columns, trace_frame, write_trace_csv
from modules.solver import SolverConfig, TerminationReason, iapd, run
from modules.tensor_core import DenseTensor, assemble, norm
from shared.core.exceptions import DimensionMismatchError, InitializationError, NumericalError, TraceError


@pytest.fixture
def defective():
    spec = GeneratorSpec(kind="defective_rank", dims=[4, 4, 4], true_rank=3, lambdas=[3.0, 2.5], seed=2)
    return generate_tensor(spec)


class TestExactInputs:
    def test_odeco_recovered_at_true_rank(self, odeco_321):
        A, truth = odeco_321
        sol = run(A, 3, SolverConfig(truncation_enabled=False))
        assert sol.termination_reason is TerminationReason.TOLERANCE
        assert sol.residual < 1e-8
        np.testing.assert_allclose(sol.lam, [3.0, 2.0, 1.0], atol=1e-8)
        err = recovery_error(sol, truth)
        assert err.lambda_error < 1e-8
        assert err.subspace_error < 1e-7

    def test_plain_apd_recovers_odeco(self, odeco_321):
        A, truth = odeco_321
        sol = run(A, 3, SolverConfig(proximal_mode="none", truncation_enabled=False))
        assert sol.residual < 1e-8
        verdicts, _ = audit_solution(A, sol, truth, exact=True)
        assert "sufficient_decrease" not in verdicts
        assert verdicts["exact_recovery"]

    def test_solution_is_normalized(self, odeco_321):
        A, _ = odeco_321
        sol = run(A, 3, SolverConfig(truncation_enabled=False, init="random", seed=3))
        assert np.all(sol.lam >= 0)
        assert np.all(np.diff(sol.lam) <= 0)
        assert sol.residual == pytest.approx(norm(A - assemble(sol.factors, sol.lam)))

    def test_default_kappa_removes_small_true_component(self):
        spec = GeneratorSpec(kind="odeco_exact", dims=[4, 4, 4], true_rank=3, lambdas=[4.30, 3.88, 1.53], seed=0)
        A, _ = generate_tensor(spec)
        sol = run(A, 3)
        kappa = sol.trace.params.kappa
        assert kappa == pytest.approx(0.5 * np.sqrt((4.30 ** 2 + 3.88 ** 2 + 1.53 ** 2) / 3))
        assert 1.53 < kappa
        assert sol.rank == 2
        assert sol.residual == pytest.approx(1.53, abs=1e-8)
        kept = run(A, 3, SolverConfig(kappa=1.0))
        assert kept.rank == 3
        assert kept.residual < 1e-8

    def test_defective_rank_truncates(self, defective):
        A, truth = defective
        sol = run(A, 3)
        assert sol.trace.truncation_sweeps()
        assert sol.rank == 2
        assert sol.to_summary()["truncations"] == 1
        assert monotonicity_audit(sol.trace).passed
        np.testing.assert_allclose(sol.lam, [3.0, 2.5], atol=1e-8)
        assert recovery_error(sol, truth).subspace_error < 1e-7


class TestGenericInputs:
    @pytest.mark.parametrize("mode", ["classic", "revised"])
    def test_audits_hold(self, gaussian_555, mode):
        sol = run(gaussian_555, 2, SolverConfig(proximal_mode=mode))
        verdicts, details = audit_solution(gaussian_555, sol)
        assert verdicts.pop("residual_identity")
        failed = [name for name, ok in verdicts.items() if not ok]
        assert not failed, {name: details.get(name) for name in failed}
        assert np.all(np.diff(sol.trace.f_values()[sol.trace.last_truncation_position() + 1:]) >= -1e-9)

    def test_square_rank_in_revised_mode(self, gaussian_444):
        sol = run(gaussian_444, 4, SolverConfig(proximal_mode="revised", max_sweeps=300))
        assert not sufficient_decrease_audit(sol.trace)
        for rec in sol.trace:
            if rec.revised_flags and any(rec.revised_flags):
                assert not any(p and r for p, r in zip(rec.proximal_flags, rec.revised_flags))

    def test_max_sweeps_termination(self, gaussian_555):
        sol = run(gaussian_555, 2, SolverConfig(max_sweeps=1))
        assert sol.termination_reason is TerminationReason.MAX_SWEEPS
        assert sol.sweeps == 1

    def test_svd_failure_reports_its_sweep(self, gaussian_444, monkeypatch):
        def failing_update(*args, **kwargs):
            raise NumericalError("SVD did not converge", driver="gesvd")

        monkeypatch.setattr(iapd, "apd_mode_update", failing_update)
        with pytest.raises(NumericalError) as info:
            run(gaussian_444, 2)
        assert (info.value.sweep, info.value.mode, info.value.driver) == (1, 1, "gesvd")
        assert "sweep 1" in str(info.value)

    def test_converged_run_is_kkt_point(self, gaussian_444):
        sol = run(gaussian_444, 2)
        if sol.termination_reason is not TerminationReason.TOLERANCE:
            pytest.skip("run stopped at max_sweeps")
        assert kkt_residual(gaussian_444, sol.factors).total <= 1e-8
        report = fit_linear_rate(sol)
        assert report.superlinear or report.rho < 1.0
        assert report.lojasiewicz is not None

    def test_invalid_problems(self, gaussian_444):
        with pytest.raises(DimensionMismatchError):
            run(gaussian_444, 5)
        with pytest.raises(DimensionMismatchError):
            run(DenseTensor(np.ones((3, 3))), 1)
        with pytest.raises(InitializationError):
            run(DenseTensor.zeros((3, 3, 3)), 1)


class TestRevisedFlip:
    """Square rank over a rank-deficient tensor: sigma_r < epsilon <= tau <= sigma_{r-1}."""

    @staticmethod
    def _deficient(noise: float):
        spec = GeneratorSpec(kind="odeco_noisy", dims=[3, 3, 3], true_rank=2,
                             lambdas=[3.0, 2.0], noise=noise, seed=4)
        return generate_tensor(spec).tensor

    def test_flip_fires_at_exact_fixed_point(self):
        A = self._deficient(0.0)
        sol = run(A, 3, SolverConfig(proximal_mode="revised", truncation_enabled=False))
        first = sol.trace.records[0]
        assert all(first.revised_flags)
        assert not any(first.proximal_flags)
        assert sol.termination_reason is TerminationReason.TOLERANCE
        assert sol.rank == 3

    def test_flip_sweeps_keep_sufficient_decrease(self):
        A = self._deficient(1e-6)
        config = SolverConfig(proximal_mode="revised", truncation_enabled=False, max_sweeps=50)
        sol = run(A, 3, config)
        params = sol.trace.params
        assert sol.trace.records[0].sigma_min[0] < params.epsilon < params.tau
        flip_sweeps = [rec for rec in sol.trace if any(rec.revised_flags)]
        assert flip_sweeps
        assert params.decrease_constant == pytest.approx(min(params.epsilon, params.tau - params.epsilon))
        assert not sufficient_decrease_audit(sol.trace)
        for rec in flip_sweeps:
            gain = rec.f_value - rec.f_start
            assert gain >= 0.5 * params.decrease_constant * rec.step_norm ** 2 - 1e-9


class TestAuditNegativeControls:
    def test_corrupted_trace_fails_audits(self, gaussian_555):
        sol = run(gaussian_555, 2, SolverConfig(max_sweeps=20, truncation_enabled=False))
        records = list(sol.trace.records)
        bad = records[1]
        records[1] = dataclasses.replace(bad, f_value=bad.f_start - 1.0)
        corrupted = sol.trace.with_records(records)
        assert sufficient_decrease_audit(corrupted)
        assert not monotonicity_audit(corrupted).passed

    def test_nonpositive_lambda_product_is_reported(self, gaussian_555):
        sol = run(gaussian_555, 2, SolverConfig(max_sweeps=5, truncation_enabled=False))
        records = list(sol.trace.records)
        products = (-1.0,) + tuple(records[0].lambda_products[1:])
        records[0] = dataclasses.replace(records[0], lambda_products=products)
        failures = positivity_chain_audit(sol.trace.with_records(records))
        assert {"sweep": records[0].sweep, "mode": 1, "product": -1.0} in failures

    def test_subdiff_audit_needs_snapshots(self, gaussian_444):
        sol = run(gaussian_444, 2, SolverConfig(max_sweeps=3, keep_snapshots=False))
        with pytest.raises(TraceError):
            subdiff_bound_audit(gaussian_444, sol.trace)
        verdicts, _ = audit_solution(gaussian_444, sol)
        assert "subdiff_bound" not in verdicts


class TestTraceExport:
    def test_columns_and_rows(self, defective, tmp_path):
        A, _ = defective
        sol = run(A, 3)
        frame = trace_frame(sol.trace)
        assert list(frame.columns) == trace_columns(3)
        assert len(frame) == sol.sweeps
        assert frame["truncated_indices"].iloc[0] != ""

        path = write_trace_csv(sol.trace, tmp_path / "nested" / "trace.csv")
        loaded = pd.read_csv(path, keep_default_na=False)
        assert list(loaded.columns) == trace_columns(3)
        np.testing.assert_allclose(loaded["f"].to_numpy(), sol.trace.f_values())

    def test_tail_proximal_fraction_bounds(self, gaussian_555):
        sol = run(gaussian_555, 2, SolverConfig(max_sweeps=50))
        assert 0.0 <= tail_proximal_fraction(sol) <= 1.0
