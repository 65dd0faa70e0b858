"""
Diagnostics derived from the continuous prime function: pi(x) as the floor of
p^-1, the local variances A(x) and B(x), and peak counting.

    A(x) = p(x) - p~(x) - (p(x0) - p~(x0))
    B(x) = p^-1(x) - R(x) - (p^-1(x0) - R(x0))

both on [x0, x0 + eps).
"""

from dataclasses import dataclass
from math import floor
from typing import Literal, Optional

import numpy as np
import pandas as pd

from src.analytic.asymptotics import asymptote, asymptote_deriv
from src.analytic.counting import li, riemann_R, riemann_R_deriv
from src.api.error_handlers import DomainError
from src.config.constants import PEAK_GRID_STEP, VARIANCE_DEFAULT_EPS_FRACTION
from src.inversion.facade import PrimeFunction
from src.splines.base import ArrayLike, as_array, unwrap
from src.utils.logger import get_logger

logger = get_logger(__name__)

VarianceKind = Literal["A", "B"]


def grid(start: float, stop: float, step: float) -> np.ndarray:
    """start, start + step, ... up to stop inclusive."""
    if step <= 0:
        raise DomainError("grid", f"step must be positive, got {step}")
    if stop < start:
        raise DomainError("grid", f"empty range {start}..{stop}")
    count = int(floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def pi_floor(x: ArrayLike, function: PrimeFunction):
    """pi(x) = floor(p^-1(x)) for x >= 2."""
    arr, scalar = as_array(x)
    if arr.size and float(arr.min()) < 2.0:
        raise DomainError("pi_floor", f"x must be >= 2, got {float(arr.min())}")
    values = np.floor(function.pinv_of(arr)).astype(np.int64)
    return int(values[0]) if scalar else values


# ==================== LOCAL VARIANCE ====================


@dataclass(frozen=True)
class VarianceWindow:
    """[x0, x0 + eps): index space for A, prime-value space for B."""

    x0: float
    eps: float
    kind: VarianceKind = "A"

    def __post_init__(self):
        if self.eps <= 0:
            raise DomainError("VarianceWindow", f"eps must be positive, got {self.eps}")
        if self.kind not in ("A", "B"):
            raise DomainError("VarianceWindow", f"kind must be A or B, got {self.kind}")
        low = 3.0 if self.kind == "A" else 2.0
        if self.x0 < low:
            raise DomainError("VarianceWindow", f"x0 must be >= {low} for kind {self.kind}")

    @classmethod
    def around(cls, x0: float, kind: VarianceKind = "A", eps: Optional[float] = None) -> "VarianceWindow":
        return cls(x0=x0, eps=eps if eps is not None else VARIANCE_DEFAULT_EPS_FRACTION * x0, kind=kind)

    @property
    def end(self) -> float:
        return self.x0 + self.eps

    def check(self, op: str, arr: np.ndarray) -> None:
        if arr.size and (float(arr.min()) < self.x0 or float(arr.max()) >= self.end):
            raise DomainError(op, f"x outside [{self.x0}, {self.end})")


def _deviation(x: ArrayLike, kind: VarianceKind, function: PrimeFunction):
    if kind == "A":
        return function.p_of(x) - asymptote(x)
    return function.pinv_of(x) - riemann_R(x)


def variance_A(x: ArrayLike, window: VarianceWindow, function: PrimeFunction):
    arr, scalar = as_array(x)
    window.check("variance_A", arr)
    values = _deviation(arr, "A", function) - _deviation(window.x0, "A", function)
    return unwrap(np.asarray(values), scalar)


def variance_B(x: ArrayLike, window: VarianceWindow, function: PrimeFunction):
    arr, scalar = as_array(x)
    window.check("variance_B", arr)
    origin = float(_deviation(np.array([window.x0]), "B", function)[0])
    values = _deviation(arr, "B", function) - origin
    return unwrap(np.asarray(values), scalar)


def variance_curve(window: VarianceWindow, function: PrimeFunction, step: float = PEAK_GRID_STEP) -> pd.DataFrame:
    """The variance of window.kind on x0, x0 + step, ... below x0 + eps."""
    xs = grid(window.x0, window.end, step)
    xs = xs[xs < window.end]
    deviation = np.asarray(_deviation(xs, window.kind, function))
    return pd.DataFrame({"x": xs, window.kind: deviation - deviation[0]})


def count_peaks(values: ArrayLike) -> int:
    """Strict local maxima of a sampled curve, equal-value plateaus merged."""
    arr = np.asarray(values, dtype=np.float64)
    steps = np.diff(arr)
    signs = np.sign(steps[steps != 0])
    return int(np.count_nonzero((signs[:-1] > 0) & (signs[1:] < 0)))


def expected_peaks(window: VarianceWindow, function: PrimeFunction) -> int:
    """
    Number of peaks the variance must show on the window, from the slopes.

    A peaks where dp falls back below p~' inside the gap after p(i); this
    happens iff 2 a_i + 1 > p~'(i + 0.5), at x = i + 1 - (p~' - 1)/(4 a_i).
    B peaks where dp^-1 drops below R' after p(i); this happens iff
    1/(2 a_i + 1) < R'(m_i) at the midpoint m_i, at
    x = p(i) + (R'^-2 - 1)/(8 a_i).
    """
    P = function.table.one_based
    n = len(function.table)
    if window.kind == "A":
        i = np.arange(max(3, int(floor(window.x0)) - 1), min(n - 1, int(floor(window.end)) + 1))
        a = (P[i + 1] - P[i] - 1).astype(np.float64)
        slope = asymptote_deriv((i + 0.5).astype(np.float64))
        active = (2.0 * a + 1.0 > slope) & (a > 0)
        crossing = i + 1.0 - (slope - 1.0) / (4.0 * np.where(a > 0, a, 1.0))
    else:
        first = max(2, function.table.count_upto(window.x0) - 1) if window.x0 <= function.table.limit else 2
        last = min(n - 1, function.table.count_upto(min(window.end, function.table.limit)) + 1)
        i = np.arange(first, last)
        p = P[i].astype(np.float64)
        a = (P[i + 1] - P[i] - 1).astype(np.float64)
        rp = riemann_R_deriv(0.5 * (P[i] + P[i + 1]).astype(np.float64))
        active = (1.0 / (2.0 * a + 1.0) < rp) & (a > 0)
        crossing = p + (1.0 / (rp * rp) - 1.0) / (8.0 * np.where(a > 0, a, 1.0))
    inside = (crossing > window.x0) & (crossing < window.end)
    return int(np.count_nonzero(active & inside))


# ==================== COMPARISON ====================


def comparison_frame(function: PrimeFunction, start: float, stop: float, step: float) -> pd.DataFrame:
    """Columns x, pi (table count), pinv, li, R over a grid in [start, stop]."""
    xs = grid(start, stop, step)
    if float(xs.min()) < 2.0:
        raise DomainError("compare", "grid must start at 2 or above")
    if float(xs.max()) > function.table.limit:
        raise DomainError("compare", f"grid exceeds the table limit {function.table.limit}")
    frame = pd.DataFrame({"x": xs})
    frame["pi"] = np.searchsorted(function.table.primes, xs, side="right")
    frame["pinv"] = function.pinv_of(xs)
    frame["li"] = li(xs)
    frame["R"] = riemann_R(xs)
    return frame
