"""
VerificationEngine - Main orchestrator for the verification battery.

Loads the suite configuration, executes registered checks, and aggregates the
results into a VerificationReport.
"""

import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from modules.harness.verification.core.base import CheckResult, CheckSeverity
from modules.harness.verification.core.config_loader import VerificationConfigLoader
from modules.harness.verification.core.registry import CHECK_REGISTRY, get_check
from shared.core.exceptions import ConfigurationException
from shared.utils.logger import setup_logger

# Import checks to trigger registration
from modules.harness.verification import checks  # noqa: F401

logger = setup_logger(__name__)


@dataclass
class VerificationReport:
    """Aggregated verdict of one battery run"""
    passed: bool
    total_checks: int
    passed_checks: int
    failed_checks: int
    warning_checks: int
    error_checks: int
    critical_checks: int
    results: List[CheckResult]
    seed: int
    config_path: str
    elapsed_seconds: float
    timestamp: datetime

    @property
    def failed_names(self) -> List[str]:
        return [r.check_name for r in self.results if not r.passed]

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization"""
        return {
            'passed': self.passed,
            'summary': {
                'total_checks': self.total_checks,
                'passed_checks': self.passed_checks,
                'failed_checks': self.failed_checks,
                'warning_checks': self.warning_checks,
                'error_checks': self.error_checks,
                'critical_checks': self.critical_checks,
            },
            'failed': self.failed_names,
            'results': [r.to_dict() for r in self.results],
            'seed': self.seed,
            'config_path': self.config_path,
            'elapsed_seconds': self.elapsed_seconds,
            'timestamp': self.timestamp.isoformat(),
        }


class VerificationEngine:
    """
    Runs the verification battery.

    Usage:
        engine = VerificationEngine()
        report = engine.run(only=["polar-error-bound"])

        if not report.passed:
            print(report.failed_names)
    """

    def __init__(self, config_path: Optional[Union[str, Path]] = None, seed: Optional[int] = None):
        """
        Args:
            config_path: Suite YAML file; defaults to settings.verification_config_path
            seed: Overrides the suite's global seed
        """
        self.config_loader = VerificationConfigLoader(config_path)
        self.config = self.config_loader.load()
        self.global_settings = self.config_loader.get_global_settings()
        self.seed = int(seed if seed is not None else self.global_settings.get('seed', 0))

        logger.info(f"VerificationEngine initialized with {len(CHECK_REGISTRY)} checks")

    def _select(self, only: Optional[Sequence[str]]) -> List[Dict[str, Any]]:
        entries = self.config_loader.get_checks()
        if not only:
            return entries
        unknown = [name for name in only if get_check(name) is None]
        if unknown:
            raise ConfigurationException(f"Unknown checks: {', '.join(unknown)}")
        selected = [entry for entry in entries if entry.get('check') in only]
        configured = {entry.get('check') for entry in selected}
        # checks absent from the suite run with their built-in defaults
        selected += [{'check': name} for name in only if name not in configured]
        return selected

    def run(self, only: Optional[Sequence[str]] = None) -> VerificationReport:
        """
        Execute the configured checks.

        Args:
            only: Restrict the run to these check names

        Raises:
            ConfigurationException: If `only` names an unregistered check
        """
        entries = self._select(only)
        stop_on_error = self.global_settings.get('stop_on_first_error', False)
        started = time.perf_counter()
        results: List[CheckResult] = []

        for entry in entries:
            name = entry.get('check')
            if not name:
                logger.warning(f"Suite entry missing 'check' field: {entry}")
                continue

            check_class = get_check(name)
            if not check_class:
                logger.warning(f"Check '{name}' not found in registry")
                results.append(CheckResult(
                    passed=False,
                    check_name=name,
                    severity=CheckSeverity.ERROR,
                    message=f"Check '{name}' is not registered",
                ))
                continue

            check_started = time.perf_counter()
            try:
                result = check_class(entry, seed=self.seed).run()
            except Exception as e:
                logger.error(f"Check '{name}' failed: {e}", exc_info=True)
                result = CheckResult(
                    passed=False,
                    check_name=name,
                    severity=CheckSeverity(entry.get('severity', 'error')),
                    message=f"Check execution failed: {e}",
                    metadata={'exception': type(e).__name__},
                )
            result.metadata.setdefault('seconds', time.perf_counter() - check_started)
            results.append(result)
            logger.info(
                f"{name}: {'pass' if result.passed else 'FAIL'} "
                f"({result.instances} instances, {result.failures} failures)"
            )

            if stop_on_error and not result.passed and result.severity in (CheckSeverity.ERROR, CheckSeverity.CRITICAL):
                logger.info(f"Stopping verification on first error: {result.message}")
                break

        return self._generate_report(results, time.perf_counter() - started)

    def _generate_report(self, results: List[CheckResult], elapsed: float) -> VerificationReport:
        failed = [r for r in results if not r.passed]
        warnings = sum(1 for r in failed if r.severity == CheckSeverity.WARNING)
        errors = sum(1 for r in failed if r.severity == CheckSeverity.ERROR)
        critical = sum(1 for r in failed if r.severity == CheckSeverity.CRITICAL)

        # Overall pass/fail (only ERROR and CRITICAL fail, WARNING passes)
        overall_passed = errors == 0 and critical == 0

        return VerificationReport(
            passed=overall_passed,
            total_checks=len(results),
            passed_checks=len(results) - len(failed),
            failed_checks=len(failed),
            warning_checks=warnings,
            error_checks=errors,
            critical_checks=critical,
            results=results,
            seed=self.seed,
            config_path=str(self.config_loader.config_path),
            elapsed_seconds=elapsed,
            timestamp=datetime.now(timezone.utc),
        )

    def get_available_checks(self) -> List[str]:
        return list(CHECK_REGISTRY.keys())
