"""
Array plumbing shared by the spline evaluators.
"""

from typing import Tuple, Union

import numpy as np

from src.api.error_handlers import DomainError

ArrayLike = Union[float, int, np.ndarray, list, tuple]


def as_array(x: ArrayLike) -> Tuple[np.ndarray, bool]:
    """Return x as a float64 array plus a flag telling whether x was scalar."""
    arr = np.asarray(x, dtype=np.float64)
    return np.atleast_1d(arr), arr.ndim == 0


def unwrap(values: np.ndarray, scalar: bool):
    """Undo ``as_array``: a float for scalar input, otherwise the array."""
    return float(values[0]) if scalar else values


def require_range(op: str, x: np.ndarray, low: float, high: float) -> None:
    """Raise DomainError unless every x lies in [low, high]."""
    if x.size == 0:
        return
    if not np.isfinite(x).all():
        raise DomainError(op, "x must be finite")
    lo, hi = float(x.min()), float(x.max())
    if lo < low or hi > high:
        bad = lo if lo < low else hi
        raise DomainError(op, f"x={bad} outside [{low}, {high}]", {"low": low, "high": high})
