"""
Residual systems for Diophantine searches.

A system holds polynomial equations f_j(x) = target_j over a box D_f and an
optional penalty row that vanishes exactly on integer (or prime) points:

    integers:  sum_j sin^2(pi x_j)
    primes:    sum_j sin^2(pi p^-1(x_j))
"""

from dataclasses import dataclass, replace
from enum import Enum
from math import prod
from typing import Optional, Sequence, Tuple

import numpy as np

from src.api.error_handlers import ConfigError, DomainError, SolverError
from src.inversion.facade import PrimeFunction
from src.utils.logger import get_logger

logger = get_logger(__name__)


class PenaltyKind(str, Enum):
    NONE = "none"
    INTEGERS = "integers"
    PRIMES = "primes"


@dataclass(frozen=True)
class PolynomialTerm:
    coeff: int
    powers: Tuple[int, ...]


@dataclass(frozen=True)
class PolynomialResidual:
    """sum_t coeff_t prod_j x_j^powers_tj = target."""

    terms: Tuple[PolynomialTerm, ...]
    target: int = 0

    @property
    def n(self) -> int:
        return len(self.terms[0].powers)

    def _arrays(self):
        coeffs = np.array([t.coeff for t in self.terms], dtype=np.float64)
        powers = np.array([t.powers for t in self.terms], dtype=np.int64)
        return coeffs, powers

    def value(self, x: np.ndarray) -> float:
        coeffs, powers = self._arrays()
        return float(coeffs @ np.prod(x[None, :] ** powers, axis=1))

    def value_many(self, points: np.ndarray) -> np.ndarray:
        """Values at the rows of a (K, n) array."""
        coeffs, powers = self._arrays()
        return np.prod(points[:, None, :] ** powers[None, :, :], axis=2) @ coeffs

    def gradient(self, x: np.ndarray) -> np.ndarray:
        coeffs, powers = self._arrays()
        grad = np.zeros(self.n)
        for j in range(self.n):
            lowered = powers.copy()
            active = lowered[:, j] > 0
            lowered[active, j] -= 1
            monomials = np.prod(x[None, :] ** lowered, axis=1)
            grad[j] = float(np.sum(np.where(active, coeffs * powers[:, j] * monomials, 0.0)))
        return grad

    def exact(self, point: Sequence[int]) -> int:
        """Integer residual, computed with Python ints."""
        total = sum(t.coeff * prod(v**e for v, e in zip(point, t.powers)) for t in self.terms)
        return total - self.target


@dataclass(frozen=True)
class Penalty:
    kind: PenaltyKind
    function: Optional[PrimeFunction] = None

    def _g(self, x: np.ndarray):
        if self.kind == PenaltyKind.PRIMES:
            return self.function.pinv_of(x), self.function.dpinv_of(x)
        return x, np.ones_like(x)

    def value(self, x: np.ndarray) -> float:
        g, _ = self._g(x)
        return float(np.sum(np.sin(np.pi * g) ** 2))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        # d/dx sin^2(pi g) = pi sin(2 pi g) g'
        g, dg = self._g(x)
        return np.pi * np.sin(2.0 * np.pi * g) * dg


@dataclass(frozen=True)
class ResidualSystem:
    """Equations f(x) = targets over lower <= x <= upper, plus an optional penalty row."""

    name: str
    equations: Tuple[PolynomialResidual, ...]
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    penalty: Optional[Penalty] = None

    def __post_init__(self):
        if not self.equations:
            raise SolverError("system has no equations")
        if len(self.lower) != len(self.upper):
            raise SolverError("box bounds differ in length", {"lower": self.lower, "upper": self.upper})
        for eq in self.equations:
            if any(len(t.powers) != self.n for t in eq.terms):
                raise SolverError(f"equation exponents do not match {self.n} variables")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise SolverError("empty domain box", {"lower": self.lower, "upper": self.upper})

    @property
    def n(self) -> int:
        return len(self.lower)

    @property
    def m(self) -> int:
        return len(self.equations) + (1 if self.penalty is not None else 0)

    @property
    def kind(self) -> PenaltyKind:
        return self.penalty.kind if self.penalty is not None else PenaltyKind.NONE

    @property
    def targets(self) -> np.ndarray:
        values = [float(eq.target) for eq in self.equations]
        if self.penalty is not None:
            values.append(0.0)
        return np.array(values)

    def f(self, x: np.ndarray) -> np.ndarray:
        values = [eq.value(x) for eq in self.equations]
        if self.penalty is not None:
            values.append(self.penalty.value(x))
        return np.array(values)

    def jac(self, x: np.ndarray) -> np.ndarray:
        rows = [eq.gradient(x) for eq in self.equations]
        if self.penalty is not None:
            rows.append(self.penalty.gradient(x))
        return np.vstack(rows)

    def residual(self, x: np.ndarray) -> np.ndarray:
        return self.f(x) - self.targets

    def clamp(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(x >= np.asarray(self.lower)) and np.all(x <= np.asarray(self.upper)))

    def exact_check(self, point: Sequence[int]) -> bool:
        """True when every base equation holds exactly at the integer point."""
        return all(eq.exact(point) == 0 for eq in self.equations)


def build_penalty(
    base: ResidualSystem, kind: PenaltyKind, function: Optional[PrimeFunction] = None
) -> ResidualSystem:
    """Return base with the penalty row of the given kind appended."""
    kind = PenaltyKind(kind)
    if kind == PenaltyKind.NONE:
        return replace(base, penalty=None)
    if kind == PenaltyKind.PRIMES:
        if function is None:
            raise ConfigError("penalty", "primes penalty needs a PrimeFunction")
        if min(base.lower) < 2:
            raise DomainError("build_penalty", f"primes penalty needs a box inside [2, inf), got lower={base.lower}")
        if max(base.upper) > function.closed_form_upper:
            logger.warning(f"Box exceeds the closed-form inverse range {function.closed_form_upper}; Newton is used")
    return replace(base, penalty=Penalty(kind=kind, function=function))


# ==================== PRESETS ====================


def _box(n: int, lower, upper) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    lo = tuple(float(v) for v in (lower if isinstance(lower, (list, tuple)) else [lower] * n))
    hi = tuple(float(v) for v in (upper if isinstance(upper, (list, tuple)) else [upper] * n))
    if len(lo) != n or len(hi) != n:
        raise ConfigError("bounds", f"expected {n} bounds")
    return lo, hi


QUASI_PYTHAGOREAN = PolynomialResidual(
    terms=(
        PolynomialTerm(1, (2, 0, 0)),
        PolynomialTerm(1, (0, 2, 0)),
        PolynomialTerm(-1, (0, 0, 2)),
    ),
    target=1,
)

TWIN_CONSTRAINT = PolynomialResidual(
    terms=(PolynomialTerm(-1, (1, 0, 0)), PolynomialTerm(1, (0, 0, 1))),
    target=2,
)


def quasi_pythagorean(lower=2, upper=100) -> ResidualSystem:
    """x1^2 + x2^2 = x3^2 + 1."""
    lo, hi = _box(3, lower, upper)
    return ResidualSystem(name="quasi_pythagorean", equations=(QUASI_PYTHAGOREAN,), lower=lo, upper=hi)


def quasi_pythagorean_twin(lower=2, upper=100) -> ResidualSystem:
    """x1^2 + x2^2 = x3^2 + 1 with x3 - x1 = 2."""
    lo, hi = _box(3, lower, upper)
    return ResidualSystem(
        name="quasi_pythagorean_twin", equations=(QUASI_PYTHAGOREAN, TWIN_CONSTRAINT), lower=lo, upper=hi
    )


PRESETS = {
    "quasi_pythagorean": quasi_pythagorean,
    "quasi_pythagorean_twin": quasi_pythagorean_twin,
}


def polynomial_system(name: str, equations: Sequence[dict], lower, upper, n: int) -> ResidualSystem:
    """
    Build a system from plain data:
    [{"terms": [{"coeff": 1, "powers": [2, 0]}, ...], "target": 1}, ...]
    """
    built = []
    for k, eq in enumerate(equations):
        terms = tuple(PolynomialTerm(int(t["coeff"]), tuple(int(e) for e in t["powers"])) for t in eq["terms"])
        if not terms:
            raise ConfigError(f"equations[{k}]", "no terms")
        if any(len(t.powers) != n for t in terms):
            raise ConfigError(f"equations[{k}]", f"every term needs {n} exponents")
        if any(e < 0 for t in terms for e in t.powers):
            raise ConfigError(f"equations[{k}]", "exponents must be non-negative")
        built.append(PolynomialResidual(terms=terms, target=int(eq.get("target", 0))))
    lo, hi = _box(n, lower, upper)
    return ResidualSystem(name=name, equations=tuple(built), lower=lo, upper=hi)
