"""
Verification checks.

Importing this package registers every check.
"""

from modules.harness.verification.checks import diagnostic_checks, kernel_checks, solver_checks  # noqa: F401
