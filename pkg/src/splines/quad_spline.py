"""
Arithmetic parabolic spline S_quad(x) and its closed-form inverse.

Every piece is centred on an integer i >= 2. With a_i = p(i+1) - p(i) - 1, the
number of composites strictly between p(i) and p(i+1),

    q_i^l(x) = -2 a_{i-1} (x - i)^2 + (x - i) + p(i)    on [i - 0.5, i]
    q_i^r(x) =  2 a_i     (x - i)^2 + (x - i) + p(i)    on [i, i + 0.5]

and S_quad(x) = x + 1 on [1, 1.5]. Expanded in powers of x all coefficients
are integers, see ``coeff_row``.

Solving q = y for the offset v = x - i gives v = 2 (y - p(i)) / (1 + sqrt(b))
with b = 8 a |y - p(i)| + 1 on the matching side, which is the textbook root
(sqrt(b) - 1) / (4a) rewritten without the a = 0 singularity. The inverse
derivative is 1 / sqrt(b).
"""

from dataclasses import asdict, dataclass
from math import floor, sqrt

import numpy as np
import pandas as pd

from src.analytic.counting import li
from src.api.error_handlers import DomainError, IndexOutOfRangeError, InternalSplineError
from src.config.constants import INVERSE_B_SLACK, LOCATE_MAX_STEPS
from src.ingestion.prime_source import PrimeTable
from src.splines.base import ArrayLike, as_array, require_range, unwrap
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class QuadSegmentPair:
    """Left and right parabolas of q_i."""

    i: int
    a_im1: int
    a_i: int
    p_i: int

    def value(self, x: float) -> float:
        v = x - self.i
        a = -self.a_im1 if v < 0 else self.a_i
        return self.p_i + v + 2.0 * a * v * v

    def deriv(self, x: float) -> float:
        v = x - self.i
        a = -self.a_im1 if v < 0 else self.a_i
        return 1.0 + 4.0 * a * v


@dataclass(frozen=True)
class QuadCoeffRow:
    """Integer coefficients alpha x^2 + beta x + gamma of both halves of q_i."""

    i: int
    p_i: int
    alpha_l: int
    beta_l: int
    gamma_l: int
    d_l: int
    alpha_r: int
    beta_r: int
    gamma_r: int
    d_r: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class InverseSegment:
    """Closed-form inverse t_i on [lower, upper] = [(p(i-1)+p(i))/2, (p(i)+p(i+1))/2]."""

    i: int
    lower: float
    upper: float
    a_im1: int
    a_i: int
    p_i: int

    def contains(self, y: float) -> bool:
        return self.lower <= y <= self.upper

    def _b(self, y: float) -> float:
        if y < self.p_i:
            b = 8.0 * self.a_im1 * (self.p_i - y) + 1.0
        else:
            b = 8.0 * self.a_i * (y - self.p_i) + 1.0
        if b < -INVERSE_B_SLACK:
            raise InternalSplineError(f"negative b={b} for y={y} in segment {self.i}")
        return max(b, 0.0)

    def evaluate(self, y: float) -> float:
        return self.i + 2.0 * (y - self.p_i) / (1.0 + sqrt(self._b(y)))

    def deriv(self, y: float) -> float:
        return 1.0 / sqrt(self._b(y))


def _require_table(table: PrimeTable, op: str) -> int:
    n = len(table)
    if n < 3:
        raise DomainError(op, f"table needs at least 3 primes, has {n}")
    return n


def composite_count(i: int, table: PrimeTable) -> int:
    """a_i = p(i+1) - p(i) - 1 for 1 <= i <= N - 1."""
    if not 1 <= i <= len(table) - 1:
        raise IndexOutOfRangeError(i, 1, len(table) - 1)
    return table.prime_at(i + 1) - table.prime_at(i) - 1


def segment_pair(i: int, table: PrimeTable) -> QuadSegmentPair:
    n = _require_table(table, "segment_pair")
    if not 2 <= i <= n - 1:
        raise IndexOutOfRangeError(i, 2, n - 1)
    return QuadSegmentPair(
        i=i,
        a_im1=composite_count(i - 1, table),
        a_i=composite_count(i, table),
        p_i=table.prime_at(i),
    )


# ==================== EVALUATION ====================


def _signed_pieces(arr: np.ndarray, table: PrimeTable):
    """Offset v = x - i and the signed curvature of the active half."""
    n = len(table)
    P = table.one_based
    i = np.clip(np.ceil(arr - 0.5).astype(np.int64), 2, n - 1)
    p = P[i]
    v = arr - i
    sigma = np.where(v < 0, -(p - P[i - 1] - 1), P[i + 1] - p - 1).astype(np.float64)
    return p.astype(np.float64), v, sigma


def eval_quad(x: ArrayLike, table: PrimeTable):
    """S_quad(x) for 1 <= x <= N - 0.5."""
    n = _require_table(table, "eval_quad")
    arr, scalar = as_array(x)
    require_range("eval_quad", arr, 1.0, n - 0.5)
    p, v, sigma = _signed_pieces(arr, table)
    values = np.where(arr <= 1.5, arr + 1.0, p + v + 2.0 * sigma * v * v)
    return unwrap(values, scalar)


def eval_quad_deriv(x: ArrayLike, table: PrimeTable):
    """dS_quad/dx; never below 1."""
    n = _require_table(table, "eval_quad_deriv")
    arr, scalar = as_array(x)
    require_range("eval_quad_deriv", arr, 1.0, n - 0.5)
    _, v, sigma = _signed_pieces(arr, table)
    values = np.where(arr <= 1.5, 1.0, 1.0 + 4.0 * sigma * v)
    return unwrap(values, scalar)


# ==================== INTEGER COEFFICIENTS ====================


def coeff_row(i: int, table: PrimeTable) -> QuadCoeffRow:
    """Expanded integer coefficients and discriminants of q_i^l and q_i^r."""
    seg = segment_pair(i, table)
    al, ar, p = seg.a_im1, seg.a_i, seg.p_i

    alpha_l, beta_l, gamma_l = -2 * al, 4 * i * al + 1, -2 * i * i * al + p - i
    alpha_r, beta_r, gamma_r = 2 * ar, -4 * i * ar + 1, 2 * i * i * ar + p - i
    return QuadCoeffRow(
        i=i,
        p_i=p,
        alpha_l=alpha_l,
        beta_l=beta_l,
        gamma_l=gamma_l,
        d_l=beta_l * beta_l - 4 * alpha_l * gamma_l,
        alpha_r=alpha_r,
        beta_r=beta_r,
        gamma_r=gamma_r,
        d_r=beta_r * beta_r - 4 * alpha_r * gamma_r,
    )


def coeff_table(i_from: int, i_to: int, table: PrimeTable) -> pd.DataFrame:
    """Rows of coeff_row for i_from <= i <= i_to as a DataFrame."""
    n = _require_table(table, "coeff_table")
    if not 2 <= i_from <= i_to <= n - 1:
        raise DomainError("coeff_table", f"need 2 <= from <= to <= {n - 1}, got {i_from}..{i_to}")

    P = table.one_based
    i = np.arange(i_from, i_to + 1, dtype=np.int64)
    p = P[i]
    al = p - P[i - 1] - 1
    ar = P[i + 1] - p - 1

    frame = pd.DataFrame({"i": i, "p": p})
    frame["alpha_l"] = -2 * al
    frame["beta_l"] = 4 * i * al + 1
    frame["gamma_l"] = -2 * i * i * al + p - i
    frame["d_l"] = frame["beta_l"] ** 2 - 4 * frame["alpha_l"] * frame["gamma_l"]
    frame["alpha_r"] = 2 * ar
    frame["beta_r"] = -4 * i * ar + 1
    frame["gamma_r"] = 2 * i * i * ar + p - i
    frame["d_r"] = frame["beta_r"] ** 2 - 4 * frame["alpha_r"] * frame["gamma_r"]
    return frame


# ==================== INVERSE ====================


def inverse_upper(table: PrimeTable) -> float:
    """Right end of the closed-form inverse domain, (p(N-1) + p(N)) / 2."""
    n = _require_table(table, "inverse_upper")
    return 0.5 * (table.prime_at(n - 1) + table.prime_at(n))


def _inverse_pieces(arr: np.ndarray, table: PrimeTable):
    n = len(table)
    P = table.one_based
    # midpoints[j] is the upper end of segment j + 1; ties go to the left segment
    i = np.clip(np.searchsorted(table.midpoints, arr, side="left") + 1, 2, n - 1)
    p = P[i].astype(np.float64)
    left = arr < p
    b = np.where(left, 8.0 * (p - P[i - 1] - 1) * (p - arr), 8.0 * (P[i + 1] - p - 1) * (arr - p)) + 1.0
    if (b < -INVERSE_B_SLACK).any():
        raise InternalSplineError("negative b under the inverse square root", {"min_b": float(b.min())})
    return i, p, np.maximum(b, 0.0)


def eval_inverse(y: ArrayLike, table: PrimeTable):
    """S_quad^-1(y) for 2 <= y <= (p(N-1) + p(N)) / 2; exact at the primes."""
    arr, scalar = as_array(y)
    require_range("eval_inverse", arr, 2.0, inverse_upper(table))
    i, p, b = _inverse_pieces(arr, table)
    values = np.where(arr <= 2.5, arr - 1.0, i + 2.0 * (arr - p) / (1.0 + np.sqrt(b)))
    return unwrap(values, scalar)


def eval_inverse_deriv(y: ArrayLike, table: PrimeTable):
    arr, scalar = as_array(y)
    require_range("eval_inverse_deriv", arr, 2.0, inverse_upper(table))
    _, _, b = _inverse_pieces(arr, table)
    values = np.where(arr <= 2.5, 1.0, 1.0 / np.sqrt(b))
    return unwrap(values, scalar)


def _inverse_segment(i: int, table: PrimeTable) -> InverseSegment:
    seg = segment_pair(i, table)
    lower = 2.0 if i == 2 else 0.5 * (table.prime_at(i - 1) + seg.p_i)
    upper = 0.5 * (seg.p_i + table.prime_at(i + 1))
    return InverseSegment(i=i, lower=lower, upper=upper, a_im1=seg.a_im1, a_i=seg.a_i, p_i=seg.p_i)


def locate_segment(y: float, table: PrimeTable) -> InverseSegment:
    """
    Find the inverse segment holding y, starting from floor(li(y)) and stepping
    by one; after LOCATE_MAX_STEPS steps fall back to bisection. Segment 2
    also covers the initial piece [2, 2.5], where its formula reduces to y - 1.
    """
    n = _require_table(table, "locate_segment")
    require_range("locate_segment", np.array([y], dtype=np.float64), 2.0, inverse_upper(table))

    i = min(max(int(floor(li(y))), 2), n - 1)
    for _ in range(LOCATE_MAX_STEPS):
        seg = _inverse_segment(i, table)
        if seg.contains(y):
            return seg
        i += -1 if y < seg.lower else 1

    logger.debug(f"locate_segment: falling back to bisection for y={y}")
    i = int(np.clip(np.searchsorted(table.midpoints, y, side="left") + 1, 2, n - 1))
    return _inverse_segment(i, table)
