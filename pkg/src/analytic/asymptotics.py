"""
Asymptotic continuation of p(x) beyond the prime table, and its C1 sewing
onto the parabolic spline.
"""

from dataclasses import dataclass
from math import e, isinf
from typing import Optional

import numpy as np

from src.api.error_handlers import DomainError
from src.config.constants import SEWING_SLOPE_DECAY
from src.ingestion.prime_source import PrimeTable
from src.splines.base import ArrayLike, as_array, unwrap
from src.splines.quad_spline import eval_quad, eval_quad_deriv
from src.utils.logger import get_logger

logger = get_logger(__name__)


def _check_domain(op: str, arr: np.ndarray) -> None:
    if arr.size and float(arr.min()) <= e:
        raise DomainError(op, f"x must exceed e, got {float(arr.min())}")


def asymptote(x: ArrayLike):
    """
    p~(x) = x (ln x + ln ln x - 1 + (ln ln x - 2)/ln x
               - ((ln ln x)^2/2 - 3 ln ln x + 5.5)/(ln x)^2)
    """
    arr, scalar = as_array(x)
    _check_domain("asymptote", arr)
    L = np.log(arr)
    LL = np.log(L)
    h = 0.5 * LL * LL - 3.0 * LL + 5.5
    values = arr * (L + LL - 1.0 + (LL - 2.0) / L - h / (L * L))
    return unwrap(values, scalar)


def asymptote_deriv(x: ArrayLike):
    arr, scalar = as_array(x)
    _check_domain("asymptote_deriv", arr)
    L = np.log(arr)
    LL = np.log(L)
    h = 0.5 * LL * LL - 3.0 * LL + 5.5
    g = L + LL - 1.0 + (LL - 2.0) / L - h / (L * L)
    # x g'(x)
    xg = 1.0 + 1.0 / L + (3.0 - LL) / (L * L) - (LL - 3.0 - 2.0 * h) / (L * L * L)
    return unwrap(g + xg, scalar)


@dataclass(frozen=True)
class AsymptoteSewing:
    """
    Corrected asymptote p~(x) + c0 + c1 lam (1 - exp(-(x - sew_x)/lam)) for
    x >= sew_x, lam = slope_decay.
    The slope term c1 exp(-(x - sew_x)/lam) keeps one sign, so p' stays
    between p~' and S_quad'(sew_x).
    With slope_decay None the correction is the affine c1 (x - sew_x).
    Value and derivative match S_quad at sew_x either way.
    """

    sew_index: int
    sew_x: float
    c0: float
    c1: float
    slope_decay: Optional[float] = SEWING_SLOPE_DECAY

    def _affine(self) -> bool:
        return self.slope_decay is None or isinf(self.slope_decay)

    def value(self, x: ArrayLike):
        arr, scalar = as_array(x)
        s = arr - self.sew_x
        if self._affine():
            correction = self.c1 * s
        else:
            correction = -self.c1 * self.slope_decay * np.expm1(-s / self.slope_decay)
        return unwrap(asymptote(arr) + self.c0 + correction, scalar)

    def deriv(self, x: ArrayLike):
        arr, scalar = as_array(x)
        s = arr - self.sew_x
        weight = 1.0 if self._affine() else np.exp(-s / self.slope_decay)
        return unwrap(asymptote_deriv(arr) + self.c1 * weight, scalar)

    def as_dict(self) -> dict:
        return {
            "sew_index": self.sew_index,
            "sew_x": self.sew_x,
            "c0": self.c0,
            "c1": self.c1,
            "slope_decay": self.slope_decay,
        }


def sew(table: PrimeTable, slope_decay: Optional[float] = SEWING_SLOPE_DECAY) -> AsymptoteSewing:
    """Sew the asymptote onto S_quad at the last external sewing point N - 0.5."""
    n = len(table)
    if n < 4:
        raise DomainError("sew", f"table needs at least 4 primes, has {n}")

    sew_x = n - 0.5
    c0 = eval_quad(sew_x, table) - asymptote(sew_x)
    c1 = eval_quad_deriv(sew_x, table) - asymptote_deriv(sew_x)
    logger.info(f"Sewing asymptote at x={sew_x}: c0={c0:.6g}, c1={c1:.6g}")
    if abs(c0) > 0.01 * asymptote(sew_x):
        logger.warning(f"Large sewing offset c0={c0:.6g} at x={sew_x}")
    return AsymptoteSewing(sew_index=n, sew_x=sew_x, c0=c0, c1=c1, slope_decay=slope_decay)

