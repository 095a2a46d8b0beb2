"""
Verification suite loader.

Loads the check list and global settings from a YAML suite file.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from shared.core.exceptions import ConfigurationException
from shared.utils.config import settings
from shared.utils.logger import setup_logger

logger = setup_logger(__name__)


class VerificationConfigLoader:
    """
    Loads verification configuration from YAML files.

    Layout:
        global:
          seed: 0
        checks:
          - check: polar-error-bound
            severity: error
            params: {instances: 500}
    """

    def __init__(self, config_path: Optional[Union[str, Path]] = None):
        """
        Args:
            config_path: Path to the suite YAML file.
                         If None, uses settings.verification_config_path
        """
        self.config_path = Path(config_path) if config_path else settings.verification_config_path
        self._config: Optional[Dict[str, Any]] = None

    def load(self) -> Dict[str, Any]:
        """
        Load configuration from YAML file.

        Raises:
            ConfigurationException: If the file is missing or malformed
        """
        if not self.config_path.exists():
            raise ConfigurationException(f"Verification suite not found: {self.config_path}")

        try:
            with open(self.config_path, 'r') as f:
                config = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            logger.error(f"Failed to parse verification suite: {e}")
            raise ConfigurationException(f"Invalid YAML in {self.config_path}: {e}") from e

        if not isinstance(config, dict) or not isinstance(config.get('checks', []), list):
            raise ConfigurationException(f"{self.config_path}: expected a mapping with a 'checks' list")

        self._config = config
        logger.info(f"Loaded verification suite from: {self.config_path}")
        return self._config

    def get_checks(self) -> List[Dict[str, Any]]:
        if self._config is None:
            self.load()
        return self._config.get('checks', [])

    def get_global_settings(self) -> Dict[str, Any]:
        if self._config is None:
            self.load()
        return self._config.get('global', {}) or {}
