"""
Prime counting approximations: offset logarithmic integral, Moebius function
and the Riemann series R(x).

li(x) here is the integral of 1/ln t from 2 to x, so li(2) = 0.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import exp, floor, log

import numpy as np
from scipy import integrate, special

from src.api.error_handlers import DomainError
from src.splines.base import ArrayLike, as_array, unwrap
from src.utils.logger import get_logger

logger = get_logger(__name__)

LI_EPSABS = 1e-12
LI_EPSREL = 1e-13
_EI_LN2 = float(special.expi(log(2.0)))


def _li_quad(x: float) -> float:
    if x == 2.0:
        return 0.0
    value, _ = integrate.quad(lambda t: 1.0 / log(t), 2.0, x, epsabs=LI_EPSABS, epsrel=LI_EPSREL, limit=200)
    return value


def li(x: ArrayLike):
    """
    Offset logarithmic integral.

    Scalars go through adaptive quadrature; arrays use the exponential
    integral identity li(x) = Ei(ln x) - Ei(ln 2), which is the same function
    in closed form and keeps dense grids cheap.
    """
    arr, scalar = as_array(x)
    if arr.size and float(arr.min()) < 2.0:
        raise DomainError("li", f"x must be >= 2, got {float(arr.min())}")
    if scalar:
        return _li_quad(float(arr[0]))
    return special.expi(np.log(arr)) - _EI_LN2


def li_deriv(x: ArrayLike):
    arr, scalar = as_array(x)
    return unwrap(1.0 / np.log(arr), scalar)


# ==================== MOEBIUS ====================


@dataclass(frozen=True)
class MobiusCache:
    """mu(n) for 1 <= n <= n_max; index 0 is unused."""

    mu: np.ndarray

    @property
    def n_max(self) -> int:
        return int(self.mu.size - 1)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.n_max:
            raise DomainError("mobius", f"n={n} outside [1, {self.n_max}]")
        return int(self.mu[n])


def mobius(n_max: int) -> MobiusCache:
    """Sieve mu(n) over 1..n_max."""
    if n_max < 1:
        raise DomainError("mobius", f"n_max must be >= 1, got {n_max}")

    mu = np.ones(n_max + 1, dtype=np.int8)
    mu[0] = 0
    is_composite = np.zeros(n_max + 1, dtype=bool)
    for p in range(2, n_max + 1):
        if is_composite[p]:
            continue
        is_composite[2 * p :: p] = True
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    mu.flags.writeable = False
    return MobiusCache(mu=mu)


@lru_cache(maxsize=1)
def _small_mobius() -> MobiusCache:
    # x <= 2**63 needs at most 63 terms
    return mobius(64)


def _series_terms(x: float) -> int:
    """Largest n with x**(1/n) >= 2."""
    return max(1, int(floor(log(x) / log(2.0) + 1e-12)))


def riemann_R(x: ArrayLike):
    """
    R(x) = sum_n mu(n)/n li(x^(1/n)), truncated at the largest n with
    x^(1/n) >= 2; the dropped terms vanish under li(2) = 0.
    """
    arr, scalar = as_array(x)
    if arr.size and float(arr.min()) < 2.0:
        raise DomainError("riemann_R", f"x must be >= 2, got {float(arr.min())}")
    mu = _small_mobius()

    if scalar:
        xv = float(arr[0])
        total = 0.0
        for n in range(1, _series_terms(xv) + 1):
            if mu[n]:
                total += mu[n] / n * _li_quad(max(2.0, exp(log(xv) / n)))
        return total

    logs = np.log(arr)
    total = np.zeros_like(arr)
    for n in range(1, _series_terms(float(arr.max())) + 1):
        if not mu[n]:
            continue
        root = np.exp(logs / n)
        active = root >= 2.0
        term = np.zeros_like(arr)
        term[active] = special.expi(logs[active] / n) - _EI_LN2
        total += mu[n] / n * term
    return total


def riemann_R_deriv(x: ArrayLike):
    """Derivative of the truncated series, (1/ln x) sum mu(n)/n x^(1/n - 1)."""
    arr, scalar = as_array(x)
    mu = _small_mobius()
    logs = np.log(arr)
    total = np.zeros_like(arr)
    for n in range(1, _series_terms(float(arr.max())) + 1):
        if not mu[n]:
            continue
        active = logs / n >= log(2.0)
        total += np.where(active, mu[n] / n * np.exp((1.0 / n - 1.0) * logs), 0.0)
    return unwrap(total / logs, scalar)
