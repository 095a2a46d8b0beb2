"""
Check registry system.

Provides decorator-based registration for checks and retrieval functions.
"""

from typing import Dict, Optional, Type

from modules.harness.verification.core.base import BaseCheck
from shared.utils.logger import setup_logger

logger = setup_logger(__name__)

# Global registry of all checks
CHECK_REGISTRY: Dict[str, Type[BaseCheck]] = {}


def register_check(name: str):
    """
    Decorator to register a check in the global registry.

    Usage:
        @register_check("polar-error-bound")
        class PolarErrorBoundCheck(BaseCheck):
            def run(self):
                ...

    Args:
        name: Unique name for the check (used in configuration and --only)
    """
    def decorator(cls: Type[BaseCheck]):
        if name in CHECK_REGISTRY:
            logger.warning(
                f"Check '{name}' is already registered. "
                f"Overwriting with {cls.__name__}"
            )

        CHECK_REGISTRY[name] = cls
        logger.debug(f"Registered check: {name} -> {cls.__name__}")
        return cls

    return decorator


def get_check(name: str) -> Optional[Type[BaseCheck]]:
    """Get check class by name from registry."""
    return CHECK_REGISTRY.get(name)


def list_checks() -> Dict[str, str]:
    """
    List all registered checks.

    Returns:
        Dictionary mapping check names to class names
    """
    return {
        name: cls.__name__
        for name, cls in CHECK_REGISTRY.items()
    }
