"""
Configuration management using pydantic-settings.
Loads configuration from environment variables and .env file.
"""

from functools import lru_cache
from pathlib import Path
from typing import Literal, Optional
from pydantic_settings import BaseSettings, SettingsConfigDict


PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent


class Settings(BaseSettings):
    """Application settings loaded from environment variables (prefix LROTA_)."""

    model_config = SettingsConfigDict(
        env_prefix="LROTA_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    # Application Configuration
    APP_NAME: str = "odeco-approx"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "INFO"
    LOG_FILE: Optional[str] = None  # attach a file handler when set

    # Output Configuration
    OUTPUT_DIR: str = "lrota_output"

    # Verification battery
    VERIFICATION_CONFIG_PATH: Optional[str] = None

    # Benchmark repeats run on this many worker threads
    BENCHMARK_WORKERS: int = 4

    @property
    def output_path(self) -> Path:
        """Default output directory as a Path."""
        return Path(self.OUTPUT_DIR)

    @property
    def verification_config_path(self) -> Path:
        """Resolve the verification suite file (defaults to the bundled one)."""
        if self.VERIFICATION_CONFIG_PATH:
            return Path(self.VERIFICATION_CONFIG_PATH)
        return PROJECT_ROOT / "config" / "verification" / "suites.yaml"


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance.
    Uses lru_cache to ensure settings are loaded only once.
    """
    return Settings()


# Global settings instance
settings = get_settings()
