"""
Custom exceptions shared by all modules.
"""

from typing import Optional


class LrotaException(Exception):
    """Base exception for the package."""
    pass


class DimensionMismatchError(LrotaException, ValueError):
    """Exception raised when operand shapes are incompatible."""
    pass


class NumericalError(LrotaException):
    """
    Exception raised when a factorization fails to converge.

    driver names the LAPACK routine; sweep and mode locate the failure inside a
    solver run and are appended to the message when known.
    """

    def __init__(self, message: str, driver: Optional[str] = None,
                 sweep: Optional[int] = None, mode: Optional[int] = None):
        self.reason = message
        self.driver = driver
        self.sweep = sweep
        self.mode = mode
        if sweep is not None:
            where = f"sweep {sweep}" + (f", mode {mode}" if mode is not None else "")
            message = f"{message} ({where})"
        super().__init__(message)


class ConfigurationException(LrotaException):
    """Exception raised for configuration errors."""
    pass


class InitializationError(LrotaException):
    """Exception raised when no starting point with positive objective is found."""
    pass


class TensorFormatError(LrotaException):
    """Exception raised when a tensor or matrix text file cannot be parsed."""
    pass


class InsufficientDataError(LrotaException):
    """Exception raised when a trace has too few points for a fit."""
    pass


class TraceError(LrotaException):
    """Exception raised when a trace lacks data an audit needs."""
    pass
