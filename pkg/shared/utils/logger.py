"""
Logging setup shared by every module.

Logs go to stderr so that the CLI can print JSON summaries on stdout. The level
comes from LROTA_LOG_LEVEL and can be raised or lowered at runtime with
set_log_level (the CLI's --log-level flag).
"""

import logging
import sys
from pathlib import Path
from typing import Any, Dict, Union

from .config import settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# loggers handed out by setup_logger, by name
_LOGGERS: Dict[str, logging.Logger] = {}


def _handler(handler: logging.Handler, level: Union[int, str]) -> logging.Handler:
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
    return handler


def setup_logger(name: str) -> logging.Logger:
    """
    Setup a logger with consistent formatting.

    Args:
        name: Logger name (usually __name__ of the module)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    # Only configure if not already configured
    if not logger.handlers:
        logger.setLevel(settings.LOG_LEVEL)
        logger.addHandler(_handler(logging.StreamHandler(sys.stderr), settings.LOG_LEVEL))
        logger.propagate = False

        if settings.LOG_FILE:
            log_path = Path(settings.LOG_FILE)
            log_path.parent.mkdir(parents=True, exist_ok=True)
            logger.addHandler(_handler(logging.FileHandler(log_path), settings.LOG_LEVEL))

    _LOGGERS[name] = logger
    return logger


def set_log_level(level: Union[int, str]) -> None:
    """Apply level to every logger created through setup_logger and its handlers."""
    if isinstance(level, str):
        level = level.upper()
    for logger in _LOGGERS.values():
        logger.setLevel(level)
        for handler in logger.handlers:
            handler.setLevel(level)


def log_function_call(logger: logging.Logger, func_name: str, **kwargs: Any) -> None:
    """
    Log a function call with its arguments.

    Args:
        logger: Logger instance
        func_name: Function name
        **kwargs: Function arguments to log
    """
    args_str = ", ".join(f"{k}={v}" for k, v in kwargs.items())
    logger.debug(f"Calling {func_name}({args_str})")


def log_error(logger: logging.Logger, error: BaseException, context: str = "") -> None:
    """
    Log an error with context; the traceback follows when DEBUG is on.

    Args:
        logger: Logger instance
        error: Exception that occurred
        context: Where the error occurred
    """
    prefix = f"{context}: " if context else ""
    logger.error(f"{prefix}{type(error).__name__}: {error}")

    if settings.DEBUG:
        logger.error("Full traceback:", exc_info=(type(error), error, error.__traceback__))
