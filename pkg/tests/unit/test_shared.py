"""Tests for the shared utilities: seeded streams, settings and exceptions."""

import logging

import numpy as np
import pytest

from shared.core.exceptions import DimensionMismatchError, LrotaException, NumericalError
from shared.utils.config import PROJECT_ROOT, Settings
from shared.utils.logger import set_log_level, setup_logger
from shared.utils.rng import as_generator, make_generator


def test_streams_are_reproducible():
    a = make_generator(3, 1, 2).standard_normal(5)
    b = make_generator(3, 1, 2).standard_normal(5)
    np.testing.assert_array_equal(a, b)


def test_streams_are_distinct():
    base = make_generator(3).standard_normal(5)
    assert not np.array_equal(base, make_generator(3, 0).standard_normal(5))
    assert not np.array_equal(make_generator(3, 1).standard_normal(5), make_generator(3, 2).standard_normal(5))


def test_as_generator_passes_generators_through():
    rng = make_generator(1)
    assert as_generator(rng) is rng
    np.testing.assert_array_equal(as_generator(9).random(3), make_generator(9).random(3))


def test_settings_defaults(monkeypatch):
    monkeypatch.delenv("LROTA_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("LROTA_VERIFICATION_CONFIG_PATH", raising=False)
    settings = Settings(_env_file=None)
    assert settings.BENCHMARK_WORKERS == 4
    assert settings.output_path.name == "lrota_output"
    assert settings.verification_config_path == PROJECT_ROOT / "config" / "verification" / "suites.yaml"


def test_settings_read_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("LROTA_OUTPUT_DIR", str(tmp_path))
    monkeypatch.setenv("LROTA_BENCHMARK_WORKERS", "2")
    settings = Settings(_env_file=None)
    assert settings.output_path == tmp_path
    assert settings.BENCHMARK_WORKERS == 2


def test_exception_hierarchy():
    assert issubclass(DimensionMismatchError, ValueError)
    assert issubclass(DimensionMismatchError, LrotaException)
    err = NumericalError("no convergence", driver="gesvd")
    assert err.driver == "gesvd"
    with pytest.raises(LrotaException):
        raise err


def test_numerical_error_locates_sweep():
    err = NumericalError("SVD did not converge", driver="gesvd", sweep=12, mode=2)
    assert (err.sweep, err.mode, err.reason) == (12, 2, "SVD did not converge")
    assert str(err) == "SVD did not converge (sweep 12, mode 2)"
    assert str(NumericalError("bad input")) == "bad input"


def test_set_log_level_updates_registered_loggers():
    logger = setup_logger("tests.log_level")
    original = logger.level
    try:
        set_log_level("debug")
        assert logger.level == logging.DEBUG
        assert all(h.level == logging.DEBUG for h in logger.handlers)
        set_log_level(logging.ERROR)
        assert logger.level == logging.ERROR
    finally:
        set_log_level(original)
