"""
Command-line tests: files written, summaries printed and exit codes.
"""

import json

import numpy as np
import pytest

from modules.harness.cli import EXIT_ERROR, EXIT_MAX_SWEEPS, EXIT_OK, main
from modules.tensor_core import read_matrices, read_tensor
from shared.utils.config import PROJECT_ROOT


def _generate(tmp_path, *extra):
    out = tmp_path / "data"
    code = main(["generate", "--dims", "4", "4", "4", "--seed", "1", "--out", str(out), *extra])
    assert code == EXIT_OK
    return out


@pytest.fixture
def odeco_file(tmp_path):
    return _generate(tmp_path, "--kind", "odeco_exact", "--true-rank", "2", "--lambdas", "3", "2") / "tensor.txt"


@pytest.fixture
def gaussian_file(tmp_path):
    return _generate(tmp_path, "--kind", "gaussian") / "tensor.txt"


class TestGenerate:
    def test_writes_tensor_and_truth(self, tmp_path, capsys):
        out = _generate(tmp_path, "--kind", "odeco_exact", "--true-rank", "2", "--lambdas", "3", "2")
        printed = json.loads(capsys.readouterr().out)
        assert printed["spec"]["kind"] == "odeco_exact"
        assert read_tensor(out / "tensor.txt").dims == (4, 4, 4)
        assert len(read_matrices(out / "truth_factors.txt")) == 3
        np.testing.assert_allclose(read_tensor(out / "truth_lambda.txt").array, [3.0, 2.0])
        assert printed["norm"] == pytest.approx(np.sqrt(13.0))

    def test_gaussian_has_no_truth(self, tmp_path):
        out = _generate(tmp_path, "--kind", "gaussian")
        assert not (out / "truth_factors.txt").exists()

    def test_invalid_spec(self, tmp_path):
        code = main(["generate", "--kind", "odeco_exact", "--dims", "3", "3", "3", "--out", str(tmp_path)])
        assert code == EXIT_ERROR


class TestDecompose:
    def test_success(self, odeco_file, tmp_path, capsys):
        out = tmp_path / "result"
        report = tmp_path / "report.json"
        capsys.readouterr()
        code = main([
            "decompose", "--input", str(odeco_file), "--rank", "2",
            "--out", str(out), "--json-report", str(report),
        ])
        assert code == EXIT_OK

        summary = json.loads(capsys.readouterr().out)
        assert summary["termination_reason"] == "tolerance"
        assert summary["lambda"] == pytest.approx([3.0, 2.0])
        assert summary["residual"] < 1e-8

        np.testing.assert_allclose(read_tensor(out / "lambda.txt").array, [3.0, 2.0], atol=1e-10)
        assert [M.shape for M in read_matrices(out / "factors.txt")] == [(4, 2)] * 3
        assert (out / "trace.csv").read_text().startswith("sweep,f,delta_f,step_norm,kkt_residual")

        data = json.loads(report.read_text())
        assert data["parameters"]["proximal_mode"] == "classic"
        assert data["kkt"]["total"] < 1e-8
        assert all(data["verdicts"].values())

    def test_solver_flags(self, odeco_file, tmp_path):
        code = main([
            "decompose", "--input", str(odeco_file), "--rank", "2", "--out", str(tmp_path / "r"),
            "--mode", "revised", "--epsilon", "1e-3", "--tau", "1e-2", "--no-truncation",
        ])
        assert code == EXIT_OK

    def test_max_sweeps_exit_code(self, gaussian_file, tmp_path):
        code = main([
            "decompose", "--input", str(gaussian_file), "--rank", "2",
            "--max-sweeps", "1", "--out", str(tmp_path / "r"),
        ])
        assert code == EXIT_MAX_SWEEPS

    def test_malformed_input(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("3 2 2 2\n1 2 3\n")
        assert main(["decompose", "--input", str(bad), "--rank", "1", "--out", str(tmp_path)]) == EXIT_ERROR

    def test_missing_input(self, tmp_path):
        missing = tmp_path / "missing.txt"
        assert main(["decompose", "--input", str(missing), "--rank", "1", "--out", str(tmp_path)]) == EXIT_ERROR

    def test_rank_too_large(self, gaussian_file, tmp_path):
        assert main(["decompose", "--input", str(gaussian_file), "--rank", "5", "--out", str(tmp_path)]) == EXIT_ERROR

    def test_inconsistent_thresholds(self, gaussian_file, tmp_path):
        code = main([
            "decompose", "--input", str(gaussian_file), "--rank", "2", "--out", str(tmp_path),
            "--mode", "revised", "--epsilon", "1.0", "--tau", "0.5",
        ])
        assert code == EXIT_ERROR

    def test_missing_required_argument(self):
        with pytest.raises(SystemExit):
            main(["decompose", "--rank", "2"])


class TestVerify:
    def test_single_check(self, tmp_path, capsys):
        code = main(["verify", "--only", "polar-error-bound", "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert "PASS  polar-error-bound" in capsys.readouterr().out
        report = json.loads((tmp_path / "verification_report.json").read_text())
        assert report["passed"]
        assert [r["check_name"] for r in report["results"]] == ["polar-error-bound"]

    def test_negative_control_fails(self, tmp_path, capsys):
        config = PROJECT_ROOT / "config" / "verification" / "negative_control.yaml"
        report_path = tmp_path / "report.json"
        code = main(["verify", "--config", str(config), "--json-report", str(report_path)])
        assert code == EXIT_ERROR
        assert "sufficient-decrease" in capsys.readouterr().err
        assert json.loads(report_path.read_text())["failed"] == ["sufficient-decrease"]

    def test_unknown_check(self, tmp_path):
        assert main(["verify", "--only", "no-such-check", "--out", str(tmp_path)]) == EXIT_ERROR


class TestBenchmark:
    def test_small_experiment(self, tmp_path, capsys):
        config = tmp_path / "experiment.json"
        config.write_text(json.dumps({
            "name": "tiny",
            "generator": {"kind": "odeco_exact", "dims": [3, 3, 3], "true_rank": 2, "lambdas": [2.0, 1.5]},
            "rank": 2,
            "solver": {"truncation_enabled": False},
            "modes": ["classic", "none"],
            "repeat": 2,
        }))
        out = tmp_path / "bench"
        code = main(["benchmark", "--config", str(config), "--out", str(out), "--workers", "2"])
        assert code == EXIT_OK
        printed = json.loads(capsys.readouterr().out)
        assert set(printed["modes"]) == {"classic", "none"}
        assert (out / "runs.json").exists()
        assert (out / "tiny_none_r001.csv").exists()

    def test_invalid_experiment(self, tmp_path):
        config = tmp_path / "experiment.json"
        config.write_text(json.dumps({"generator": {"kind": "gaussian", "dims": [3, 3, 3]}, "rank": 4}))
        assert main(["benchmark", "--config", str(config), "--out", str(tmp_path)]) == EXIT_ERROR
