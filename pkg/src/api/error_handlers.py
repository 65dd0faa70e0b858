"""
Error handling and custom exceptions for primespline.
"""

import traceback
from datetime import datetime
from typing import Any, Dict, Optional

from fastapi import HTTPException, status

from src.utils.logger import get_logger

logger = get_logger(__name__)


class PrimeSplineError(Exception):
    """Base exception for primespline."""

    exit_code = 1

    def __init__(
        self,
        message: str,
        error_code: str = "PRIMESPLINE_ERROR",
        status_code: int = status.HTTP_500_INTERNAL_SERVER_ERROR,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.error_code = error_code
        self.status_code = status_code
        self.details = details or {}
        self.timestamp = datetime.utcnow().isoformat()
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for response."""
        return {
            "error_code": self.error_code,
            "message": self.message,
            "details": self.details,
            "timestamp": self.timestamp,
        }


class DomainError(PrimeSplineError):
    """Raised when an argument lies outside an operation's domain."""

    def __init__(self, operation: str, reason: str, details: Optional[Dict] = None):
        message = f"{operation}: {reason}"
        super().__init__(
            message=message,
            error_code="DOMAIN_ERROR",
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            details=details or {"operation": operation, "reason": reason},
        )


class IndexOutOfRangeError(PrimeSplineError):
    """Raised when a 1-based prime index falls outside the table."""

    def __init__(self, index, low: int, high: int):
        message = f"Index {index} outside [{low}, {high}]"
        super().__init__(
            message=message,
            error_code="INDEX_OUT_OF_RANGE",
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            details={"index": index, "low": low, "high": high},
        )


class PrimeFormatError(PrimeSplineError):
    """Raised when a prime file fails validation."""

    def __init__(self, source: str, reason: str, value=None):
        message = f"Invalid prime file '{source}': {reason}"
        super().__init__(
            message=message,
            error_code="PRIME_FORMAT_ERROR",
            status_code=status.HTTP_400_BAD_REQUEST,
            details={"source": source, "reason": reason, "value": value},
        )


class ConvergenceError(PrimeSplineError):
    """Raised when the Newton ladder is exhausted without convergence."""

    def __init__(self, x: float, reason: str, trace=None):
        message = f"Newton inversion of x={x} failed: {reason}"
        self.trace = trace
        super().__init__(
            message=message,
            error_code="CONVERGENCE_ERROR",
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            details={"x": x, "reason": reason},
        )


class SolverError(PrimeSplineError):
    """Raised when a residual system or a linear subproblem is unusable."""

    def __init__(self, reason: str, details: Optional[Dict] = None):
        message = f"Solver failure: {reason}"
        super().__init__(
            message=message,
            error_code="SOLVER_ERROR",
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            details=details or {"reason": reason},
        )


class ConfigError(PrimeSplineError):
    """Raised when a configuration is valid JSON but semantically wrong."""

    def __init__(self, field: str, reason: str):
        message = f"Configuration error in '{field}': {reason}"
        super().__init__(
            message=message,
            error_code="CONFIG_ERROR",
            status_code=status.HTTP_400_BAD_REQUEST,
            details={"field": field, "reason": reason},
        )


class MalformedConfigError(ConfigError):
    """Raised when a configuration file cannot be parsed at all."""

    exit_code = 2


class InternalSplineError(PrimeSplineError):
    """Raised on broken internal invariants, such as a mislocated segment."""

    def __init__(self, reason: str, details: Optional[Dict] = None):
        super().__init__(
            message=f"Internal spline error: {reason}",
            error_code="INTERNAL_SPLINE_ERROR",
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            details=details or {"reason": reason},
        )


def handle_exception(exc: Exception) -> Dict[str, Any]:
    """
    Handle and log exceptions.
    Returns a standardized error response.
    """
    if isinstance(exc, PrimeSplineError):
        logger.error(f"{exc.error_code}: {exc.message}")
        return exc.to_dict()

    # Unknown exception
    logger.error(f"Unexpected error: {type(exc).__name__}: {exc}\n{traceback.format_exc()}")
    return {
        "error_code": "INTERNAL_ERROR",
        "message": "An unexpected error occurred",
        "details": {"type": type(exc).__name__},
        "timestamp": datetime.utcnow().isoformat(),
    }


def create_http_exception(exc: PrimeSplineError) -> HTTPException:
    """Convert PrimeSplineError to FastAPI HTTPException."""
    return HTTPException(status_code=exc.status_code, detail=exc.to_dict())
