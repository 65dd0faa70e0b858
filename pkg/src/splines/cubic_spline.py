"""
Cubic spline S_cub(x) through the points (i, p(i)).

On [1, 1.5] the spline is x + 1. For i >= 2 the piece on [i - 0.5, i + 0.5] is

    c_i(x) = 2(a_i u^2 + b_i u + (p(i) + p(i+1))/2)(x - i) - 2 p(i) u,   u = x - i - 0.5

with a_i = (p(i+1) - p(i-1))/2 - 1 and b_i = p(i+1) - p(i) - 1. The pieces are C1
at every half-integer. The derivative is positive on piece i exactly when the
discriminant d_i of dc_i/dx is negative; the few prime triplets where it is not
are reported by ``violation_census``.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt
from typing import List, Tuple

import numpy as np

from src.api.error_handlers import DomainError, IndexOutOfRangeError
from src.config.constants import PATTERN_DELTA1_VALUES, PATTERN_SCAN_LIMIT
from src.ingestion.prime_source import PrimeTable
from src.splines.base import ArrayLike, as_array, require_range, unwrap
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class CubicSegment:
    """Coefficients of c_i on [i - 0.5, i + 0.5]."""

    i: int
    a_i: float
    b_i: float
    p_i: int
    p_ip1: int

    def value(self, x: float) -> float:
        v = x - self.i
        u = v - 0.5
        return 2.0 * (self.a_i * u * u + self.b_i * u + 0.5 * (self.p_i + self.p_ip1)) * v - 2.0 * self.p_i * u

    def deriv(self, x: float) -> float:
        v = x - self.i
        u = v - 0.5
        a, b = self.a_i, self.b_i
        return 2.0 * (2.0 * a * u + b) * v + 2.0 * a * u * u + 2.0 * b * u - self.p_i + self.p_ip1


@dataclass(frozen=True)
class TripletReport:
    """Monotonicity verdict for the triplet (p(i-1), p(i), p(i+1))."""

    i: int
    p_im1: int
    p_i: int
    p_ip1: int
    d_i: float
    violates: bool
    bounds: Tuple[float, float]
    t_i: int

    def as_dict(self) -> dict:
        return {
            "i": self.i,
            "p_im1": self.p_im1,
            "p_i": self.p_i,
            "p_ip1": self.p_ip1,
            "d_i": self.d_i,
            "violates": self.violates,
            "lower": self.bounds[0],
            "upper": self.bounds[1],
            "t_i": self.t_i,
        }


def _require_table(table: PrimeTable, op: str) -> int:
    n = len(table)
    if n < 3:
        raise DomainError(op, f"table needs at least 3 primes, has {n}")
    return n


def segment(i: int, table: PrimeTable) -> CubicSegment:
    """Return the cubic piece c_i, 2 <= i <= N - 1."""
    n = _require_table(table, "segment")
    if not 2 <= i <= n - 1:
        raise IndexOutOfRangeError(i, 2, n - 1)
    pm, p, pp = table.prime_at(i - 1), table.prime_at(i), table.prime_at(i + 1)
    return CubicSegment(i=i, a_i=0.5 * (pp - pm) - 1.0, b_i=float(pp - p - 1), p_i=p, p_ip1=pp)


def _pieces(arr: np.ndarray, table: PrimeTable):
    n = len(table)
    P = table.one_based
    # half-integers belong to the left piece
    i = np.clip(np.ceil(arr - 0.5).astype(np.int64), 2, n - 1)
    pm = P[i - 1].astype(np.float64)
    p = P[i].astype(np.float64)
    pp = P[i + 1].astype(np.float64)
    a = 0.5 * (pp - pm) - 1.0
    b = pp - p - 1.0
    v = arr - i
    u = v - 0.5
    return a, b, p, pp, u, v


def eval_cubic(x: ArrayLike, table: PrimeTable):
    """S_cub(x) for 1 <= x <= N - 0.5."""
    n = _require_table(table, "eval_cubic")
    arr, scalar = as_array(x)
    require_range("eval_cubic", arr, 1.0, n - 0.5)
    a, b, p, pp, u, v = _pieces(arr, table)
    values = 2.0 * (a * u * u + b * u + 0.5 * (p + pp)) * v - 2.0 * p * u
    values = np.where(arr <= 1.5, arr + 1.0, values)
    return unwrap(values, scalar)


def eval_cubic_deriv(x: ArrayLike, table: PrimeTable):
    """Analytic derivative of the active piece of S_cub."""
    n = _require_table(table, "eval_cubic_deriv")
    arr, scalar = as_array(x)
    require_range("eval_cubic_deriv", arr, 1.0, n - 0.5)
    a, b, p, pp, u, v = _pieces(arr, table)
    values = 2.0 * (2.0 * a * u + b) * v + 2.0 * a * u * u + 2.0 * b * u - p + pp
    values = np.where(arr <= 1.5, 1.0, values)
    return unwrap(values, scalar)


def expanded_coefficients(i: int, table: PrimeTable) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """
    Exact monomial coefficients (alpha, beta, gamma, delta) of
    c_i(x) = alpha x^3 + beta x^2 + gamma x + delta.
    """
    seg = segment(i, table)
    a = Fraction(seg.p_ip1 - table.prime_at(i - 1), 2) - 1
    b = Fraction(seg.b_i)
    m = Fraction(seg.p_i + seg.p_ip1, 2)
    p = Fraction(seg.p_i)
    s = Fraction(2 * i + 1, 2)

    alpha = 2 * a
    beta = 2 * (b - 2 * a * s - a * i)
    gamma = 2 * (a * s * s - b * s + m - i * b + 2 * a * i * s) - 2 * p
    delta = -2 * i * (a * s * s - b * s + m) + 2 * p * s
    return alpha, beta, gamma, delta


# ==================== TRIPLET CONDITION ====================


def _quad_form(pm: int, p: int, pp: int) -> Tuple[int, int]:
    """Return ((4p - 2(pm + pp))^2, t) so that 4 d = first - t, in exact integers."""
    t = 3 * ((pp - pm) ** 2 - 4)
    q = (4 * p - 2 * (pm + pp)) ** 2
    return q, t


def triplet_report(i: int, pm: int, p: int, pp: int) -> TripletReport:
    """Discriminant and bounds for an arbitrary integer triplet."""
    q, t = _quad_form(pm, p, pp)
    half_width = sqrt(t) / 4.0 if t > 0 else 0.0
    centre = 0.5 * (pm + pp)
    return TripletReport(
        i=i,
        p_im1=pm,
        p_i=p,
        p_ip1=pp,
        d_i=(q - t) / 4.0,
        violates=q >= t,
        bounds=(centre - half_width, centre + half_width),
        t_i=t,
    )


def discriminant(i: int, table: PrimeTable) -> TripletReport:
    """d_i and the triplet bounds for 2 <= i <= N - 1."""
    n = _require_table(table, "discriminant")
    if not 2 <= i <= n - 1:
        raise IndexOutOfRangeError(i, 2, n - 1)
    return triplet_report(i, table.prime_at(i - 1), table.prime_at(i), table.prime_at(i + 1))


def violation_census(n: int, table: PrimeTable) -> List[TripletReport]:
    """All triplets with indices 2..n-1 whose discriminant is non-negative."""
    if n > len(table):
        raise IndexOutOfRangeError(n, 0, len(table))
    if n < 3:
        return []

    P = table.one_based
    idx = np.arange(2, n, dtype=np.int64)
    pm, p, pp = P[idx - 1], P[idx], P[idx + 1]
    t = 3 * ((pp - pm) ** 2 - 4)
    q = (4 * p - 2 * (pm + pp)) ** 2
    hits = idx[q >= t]

    reports = [discriminant(int(i), table) for i in hits]
    logger.info(f"Triplet census over {n} primes: {len(reports)} violations")
    return reports


def pattern_thresholds(delta1: int) -> int:
    """
    Smallest even gap delta2 such that the gap pattern (delta1, delta2) gives a
    non-negative discriminant. The discriminant depends on the gaps only.
    """
    if delta1 not in PATTERN_DELTA1_VALUES:
        raise DomainError("pattern_thresholds", f"delta1 must be one of {PATTERN_DELTA1_VALUES}")

    for delta2 in range(2, PATTERN_SCAN_LIMIT + 1, 2):
        q, t = _quad_form(0, delta1, delta1 + delta2)
        if q >= t:
            return delta2
    raise DomainError("pattern_thresholds", f"no threshold below {PATTERN_SCAN_LIMIT}")
