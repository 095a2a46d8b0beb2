"""
Verification engine runs over small suites.
"""

import pytest
import yaml

from modules.harness.verification import VerificationEngine
from shared.core.exceptions import ConfigurationException


def _suite(tmp_path, checks, **global_settings):
    path = tmp_path / "suite.yaml"
    path.write_text(yaml.safe_dump({'global': {'seed': 0, **global_settings}, 'checks': checks}))
    return path


def test_fast_checks_pass():
    engine = VerificationEngine()
    report = engine.run(only=["formula-utilities", "rate-calibration", "tangent-normal-split", "kkt-reduction"])
    assert report.passed, report.failed_names
    assert report.total_checks == 4
    assert all('seconds' in r.metadata for r in report.results)


def test_gradient_and_kernel_checks_pass(tmp_path):
    path = _suite(tmp_path, [
        {'check': 'gradient-check', 'params': {'points': 3, 'directions': 5}},
        {'check': 'principal-angles', 'params': {'instances': 20}},
        {'check': 'complement-angles', 'params': {'instances': 20}},
        {'check': 'completion-bound', 'params': {'instances': 20}},
    ])
    report = VerificationEngine(path).run()
    assert report.passed, [r.message for r in report.results if not r.passed]


def test_solver_checks_pass_on_small_batches(tmp_path):
    path = _suite(tmp_path, [
        {'check': 'exact-recovery', 'params': {'instances': 6}},
        {'check': 'monotonicity', 'params': {'instances': 3}},
        {'check': 'kkt-limit', 'params': {'instances': 2}},
    ])
    report = VerificationEngine(path).run()
    assert report.passed, [r.to_dict() for r in report.results if not r.passed]
    assert report.results[0].message.endswith("(truncation off)")


def test_default_kappa_removals_match_prediction(tmp_path):
    path = _suite(tmp_path, [{'check': 'default-kappa', 'params': {'instances': 8}}])
    report = VerificationEngine(path).run()
    result = report.results[0]
    assert result.passed, result.to_dict()
    rates = result.metadata['true_component_loss_rate']
    assert set(rates) == {"odeco_exact", "defective_rank"}
    assert all(0.0 <= rate <= 1.0 for rate in rates.values())
    assert "default kappa removed a true component" in result.message


def test_checks_outside_the_suite_use_defaults(tmp_path):
    path = _suite(tmp_path, [])
    report = VerificationEngine(path).run(only=["formula-utilities"])
    assert report.passed
    assert report.results[0].check_name == "formula-utilities"


def test_unknown_check_rejected():
    with pytest.raises(ConfigurationException):
        VerificationEngine().run(only=["no-such-check"])


def test_warning_failures_do_not_fail_the_battery(tmp_path):
    path = _suite(tmp_path, [{
        'check': 'sufficient-decrease', 'severity': 'warning',
        'params': {'instances': 1, 'kinds': ['odeco_noisy'], 'constant_scale': 1.0e12, 'solver': {'max_sweeps': 50}},
    }])
    report = VerificationEngine(path).run()
    assert report.passed
    assert report.warning_checks == 1
    assert report.failed_names == ["sufficient-decrease"]


def test_crashing_check_becomes_failure(tmp_path):
    path = _suite(tmp_path, [{'check': 'formula-utilities', 'params': {'max_n': 'ten'}}])
    report = VerificationEngine(path).run()
    assert not report.passed
    result = report.results[0]
    assert result.metadata['exception'] == 'TypeError'
    assert result.message.startswith("Check execution failed")


def test_stop_on_first_error(tmp_path):
    path = _suite(tmp_path, [
        {'check': 'formula-utilities', 'params': {'max_n': 'ten'}},
        {'check': 'rate-calibration'},
    ], stop_on_first_error=True)
    report = VerificationEngine(path).run()
    assert report.total_checks == 1


def test_seed_override_and_report(tmp_path):
    path = _suite(tmp_path, [{'check': 'rate-calibration'}])
    report = VerificationEngine(path, seed=42).run()
    data = report.to_dict()
    assert data['seed'] == 42
    assert data['summary']['passed_checks'] == 1
    assert data['config_path'] == str(path)


def test_available_checks():
    assert "polar-error-bound" in VerificationEngine().get_available_checks()
