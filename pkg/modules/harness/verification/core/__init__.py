"""Core verification components."""

from modules.harness.verification.core.base import BaseCheck, CheckError, CheckResult, CheckSeverity
from modules.harness.verification.core.config_loader import VerificationConfigLoader
from modules.harness.verification.core.registry import (
    CHECK_REGISTRY,
    get_check,
    list_checks,
    register_check,
)

__all__ = [
    'BaseCheck',
    'CheckError',
    'CheckResult',
    'CheckSeverity',
    'VerificationConfigLoader',
    'CHECK_REGISTRY',
    'get_check',
    'list_checks',
    'register_check',
]
