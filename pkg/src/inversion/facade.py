"""
PrimeFunction: the continuous prime function p(x) on [0, inf) and its inverse.

    x < 1                 x + 1
    1 <= x <= N - 0.5     S_quad (or S_cub)
    x > N - 0.5           asymptote sewn onto S_quad at N - 0.5

The inverse is closed form on the parabolic spline range and Newton elsewhere.
"""

import copy
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from src.analytic.asymptotics import AsymptoteSewing, sew
from src.api.error_handlers import ConfigError, DomainError
from src.config.constants import SEWING_SLOPE_DECAY
from src.ingestion.prime_source import PrimeTable
from src.inversion.newton import NewtonConfig, NewtonTrace, newton_inverse
from src.splines import cubic_spline, quad_spline
from src.splines.base import ArrayLike, as_array, unwrap
from src.utils.logger import get_logger

logger = get_logger(__name__)

SPLINE_KINDS = ("quad", "cubic")
BACKENDS = ("closed", "newton")


class PrimeFunction:
    """Continuous interpolant of p(i) backed by one prime table."""

    def __init__(
        self,
        table: PrimeTable,
        spline: str = "quad",
        slope_decay: Optional[float] = SEWING_SLOPE_DECAY,
        newton_config: Optional[NewtonConfig] = None,
    ):
        if spline not in SPLINE_KINDS:
            raise ConfigError("spline", f"expected one of {SPLINE_KINDS}, got '{spline}'")
        self.table = table
        self.spline = spline
        self.sewing: AsymptoteSewing = sew(table, slope_decay)
        self.newton_config = newton_config or NewtonConfig()

        if spline == "quad":
            self._eval, self._deriv = quad_spline.eval_quad, quad_spline.eval_quad_deriv
        else:
            self._eval, self._deriv = cubic_spline.eval_cubic, cubic_spline.eval_cubic_deriv

    def __repr__(self) -> str:
        return f"PrimeFunction(spline={self.spline!r}, table={self.table!r})"

    @property
    def sew_x(self) -> float:
        return self.sewing.sew_x

    @property
    def closed_form_upper(self) -> float:
        """Largest y handled by the closed-form inverse."""
        return quad_spline.inverse_upper(self.table)

    def with_newton_config(self, config: NewtonConfig) -> "PrimeFunction":
        """Shallow copy sharing table and sewing, with another Newton config."""
        clone = copy.copy(self)
        clone.newton_config = config
        return clone

    # ==================== FORWARD ====================

    def _piecewise(self, x: ArrayLike, spline_fn, asym_fn, below):
        arr, scalar = as_array(x)
        if np.isnan(arr).any() or (arr < 0).any():
            raise DomainError("p_of", "x must be a non-negative number")
        out = np.empty_like(arr)
        low = arr < 1.0
        mid = (arr >= 1.0) & (arr <= self.sew_x)
        high = arr > self.sew_x
        out[low] = below(arr[low])
        if mid.any():
            out[mid] = spline_fn(arr[mid], self.table)
        if high.any():
            out[high] = asym_fn(arr[high])
        return unwrap(out, scalar)

    def p_of(self, x: ArrayLike):
        """p(x) for x >= 0."""
        return self._piecewise(x, self._eval, self.sewing.value, lambda a: a + 1.0)

    def dp_of(self, x: ArrayLike):
        return self._piecewise(x, self._deriv, self.sewing.deriv, np.ones_like)

    # ==================== INVERSE ====================

    def _resolve_backend(self, backend: Optional[str]) -> str:
        if backend is None:
            return "closed" if self.spline == "quad" else "newton"
        if backend not in BACKENDS:
            raise ConfigError("backend", f"expected one of {BACKENDS}, got '{backend}'")
        if backend == "closed" and self.spline == "cubic":
            raise ConfigError("backend", "the cubic spline has no closed-form inverse")
        return backend

    def pinv_newton(self, y: float, config: Optional[NewtonConfig] = None) -> Tuple[float, NewtonTrace]:
        """Newton inverse of p at a single y >= 2, with its trace."""
        return newton_inverse(float(y), self.p_of, self.dp_of, config or self.newton_config)

    def _pinv_scalar(self, y: float, backend: str) -> float:
        if y < 2.0:
            return y - 1.0
        if backend == "closed" and y <= self.closed_form_upper:
            return float(quad_spline.eval_inverse(y, self.table))
        x, _ = self.pinv_newton(y)
        return x

    def pinv_of(self, y: ArrayLike, backend: Optional[str] = None):
        """p^-1(y) for y >= 1."""
        backend = self._resolve_backend(backend)
        arr, scalar = as_array(y)
        if np.isnan(arr).any() or (arr < 1.0).any():
            raise DomainError("pinv_of", "y must be >= 1")

        out = np.empty_like(arr)
        if backend == "closed":
            closed = (arr >= 2.0) & (arr <= self.closed_form_upper)
            out[closed] = quad_spline.eval_inverse(arr[closed], self.table)
            rest = np.flatnonzero(~closed)
        else:
            rest = np.arange(arr.size)
        for k in rest:
            out[k] = self._pinv_scalar(float(arr[k]), backend)
        return unwrap(out, scalar)

    def dpinv_of(self, y: ArrayLike, backend: Optional[str] = None):
        """Derivative of p^-1, equal to 1 / p'(p^-1(y))."""
        backend = self._resolve_backend(backend)
        arr, scalar = as_array(y)
        if np.isnan(arr).any() or (arr < 1.0).any():
            raise DomainError("dpinv_of", "y must be >= 1")

        out = np.ones_like(arr)
        if backend == "closed":
            closed = (arr >= 2.0) & (arr <= self.closed_form_upper)
            out[closed] = quad_spline.eval_inverse_deriv(arr[closed], self.table)
            rest = np.flatnonzero(~closed & (arr >= 2.0))
        else:
            rest = np.flatnonzero(arr >= 2.0)
        for k in rest:
            out[k] = 1.0 / self.dp_of(self._pinv_scalar(float(arr[k]), backend))
        return unwrap(out, scalar)

    def pi_of(self, x: ArrayLike):
        """Smooth prime counting function p^-1(x) for x >= 1."""
        return self.pinv_of(x)


# ==================== INITIAL GUESS COMPARISON ====================


def compare_initial_guesses(
    function: PrimeFunction,
    xs: ArrayLike,
    strategies: Tuple[str, ...] = ("li", "x_over_lnx", "riemann_R"),
    config: Optional[NewtonConfig] = None,
) -> pd.DataFrame:
    """
    Run the Newton inverse from each initial-guess strategy and tabulate
    iteration counts, accepted eps0 and the final residual per x.
    """
    base = config or function.newton_config
    arr, _ = as_array(xs)
    rows: List[dict] = []
    for strategy in strategies:
        cfg = base.model_copy(update={"y0_strategy": strategy})
        for x in arr:
            y, trace = function.pinv_newton(float(x), cfg)
            rows.append(
                {
                    "strategy": strategy,
                    "x": float(x),
                    "y0": trace.y0,
                    "y": y,
                    "iterations": len(trace.iterations),
                    "eps0": trace.eps0,
                    "attempts": len(trace.attempts),
                    "monotone": trace.monotone,
                    "residual": abs(function.p_of(y) - float(x)),
                }
            )
    frame = pd.DataFrame(rows)
    logger.info(f"Compared {len(strategies)} initial guesses over {arr.size} points")
    return frame
