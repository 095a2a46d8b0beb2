"""
Verification battery.

Seeded property checks over the matrix kernels, solver traces and diagnostics,
configured in YAML and run by VerificationEngine.

Usage:
    from modules.harness.verification import VerificationEngine

    report = VerificationEngine().run(only=["polar-error-bound"])
    print(report.to_dict())
"""

from modules.harness.verification.core import (
    CHECK_REGISTRY,
    BaseCheck,
    CheckResult,
    CheckSeverity,
    VerificationConfigLoader,
    get_check,
    list_checks,
    register_check,
)
from modules.harness.verification.engine import VerificationEngine, VerificationReport

__all__ = [
    'VerificationEngine',
    'VerificationReport',
    'VerificationConfigLoader',
    'BaseCheck',
    'CheckResult',
    'CheckSeverity',
    'CHECK_REGISTRY',
    'register_check',
    'get_check',
    'list_checks',
]
