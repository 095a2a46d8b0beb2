"""
Base classes and data models for the verification battery.

This module provides the foundation for all checks:
- BaseCheck: Abstract base class for all checks
- CheckResult: Standard result format
- CheckSeverity: Severity levels
"""

import zlib
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field as dataclass_field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from shared.utils.rng import make_generator


class CheckSeverity(str, Enum):
    """Severity levels for check results"""
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"
    CRITICAL = "critical"


@dataclass
class CheckResult:
    """
    Standard check result format.

    All checks must return this format for consistency.
    """
    passed: bool
    check_name: str
    severity: CheckSeverity
    message: str

    # Instance counts
    instances: int = 0
    failures: int = 0

    # First few failing instances, for the report
    examples: List[Dict[str, Any]] = dataclass_field(default_factory=list)
    metadata: Dict[str, Any] = dataclass_field(default_factory=dict)
    timestamp: datetime = dataclass_field(default_factory=lambda: datetime.now(timezone.utc))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization"""
        data = asdict(self)
        data['severity'] = self.severity.value
        data['timestamp'] = self.timestamp.isoformat()
        return data


class BaseCheck(ABC):
    """
    Abstract base class for all checks.

    Example:
        @register_check("my-check")
        class MyCheck(BaseCheck):
            def run(self) -> CheckResult:
                ...
                return self._create_result(passed=True, instances=n)
    """

    max_examples = 5

    def __init__(self, config: Dict[str, Any], seed: int = 0):
        """
        Initialize check with configuration.

        Args:
            config: Entry from the suite YAML (check, params, severity, message)
            seed: Root seed for the battery; each check draws from its own stream
        """
        self.config = config
        self.name = config.get('check', self.__class__.__name__)
        self.params: Dict[str, Any] = config.get('params') or {}
        self.severity = CheckSeverity(config.get('severity', 'error'))
        self.message_template = config.get('message', '')
        self.seed = int(config.get('seed', seed))

    @abstractmethod
    def run(self) -> CheckResult:
        """
        Execute the check over its seeded instances.

        Returns:
            CheckResult object
        """

    def param(self, key: str, default: Any) -> Any:
        return self.params.get(key, default)

    @property
    def stream_key(self) -> int:
        """Stream coordinate derived from the check name."""
        return zlib.crc32(self.name.encode())

    def rng(self, *stream: int) -> np.random.Generator:
        return make_generator(self.seed, self.stream_key, *stream)

    def _create_result(
        self,
        passed: bool,
        message: str = "",
        instances: int = 0,
        failures: Optional[List[Dict[str, Any]]] = None,
        **kwargs
    ) -> CheckResult:
        """
        Helper to create CheckResult with common fields.

        Args:
            passed: Whether the check passed
            message: Result message (uses template if not provided)
            instances: Number of instances evaluated
            failures: Failing instances; the first few are kept as examples
            **kwargs: Additional fields for CheckResult
        """
        failures = failures or []
        return CheckResult(
            passed=passed,
            check_name=self.name,
            severity=self.severity,
            message=message or self.message_template,
            instances=instances,
            failures=len(failures),
            examples=failures[:self.max_examples],
            **kwargs
        )


class CheckError(Exception):
    """Exception raised when check logic encounters an error"""
    pass
