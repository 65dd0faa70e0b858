"""
Autoregularized Newton inversion of a monotone function p.

    y_{k+1} = y_k - (p(y_k) - x) / (dp(y_k) + eps_k)
    eps_k   = (sqrt(dp(y_k)^2 + 4 N |p(y_k) - x|) - dp(y_k)) / 2
    N       = (eps0^2 + eps0 dp(y_0)) / |p(y_0) - x|

so eps_0 equals the chosen eps0 and eps_k vanishes with the residual.
"""

from dataclasses import dataclass, field
from math import inf, isfinite, log, sqrt
from typing import Callable, List, Literal, Optional, Tuple

import pandas as pd
from pydantic import BaseModel, Field, validator

from src.analytic.counting import li, riemann_R
from src.api.error_handlers import ConvergenceError, DomainError
from src.config.constants import NEWTON_DIVISION_GUARD, NEWTON_EPS0_LADDER, NEWTON_TOL_RESID
from src.utils.logger import get_logger

logger = get_logger(__name__)

Y0Strategy = Literal["li", "x_over_lnx", "riemann_R"]


class NewtonConfig(BaseModel):
    """Settings of one Newton inversion."""

    eps0: float = Field(1e-6, gt=0, description="First regularizer tried")
    max_iter: int = Field(100, ge=1, le=10_000)
    tol_resid: float = Field(
        NEWTON_TOL_RESID, gt=0, description="Stop when |p(y) - x| <= tol_resid * max(1, |x|)"
    )
    y0_strategy: Y0Strategy = "li"
    enforce_monotone: bool = Field(True, description="Escalate eps0 when the residual grows")
    ladder: Tuple[float, ...] = NEWTON_EPS0_LADDER

    @validator("ladder")
    def ladder_positive(cls, v):
        if not v or any(e <= 0 for e in v):
            raise ValueError("ladder must hold positive values")
        return tuple(sorted(v))

    class Config:
        json_schema_extra = {
            "example": {"eps0": 1e-6, "max_iter": 100, "tol_resid": 1e-10, "y0_strategy": "li"}
        }

    def rungs(self) -> List[float]:
        """eps0 followed by every larger ladder value."""
        return [self.eps0] + [e for e in self.ladder if e > self.eps0]


@dataclass
class NewtonIterate:
    k: int
    y: float
    residual: float
    dp: float
    eps: float


@dataclass
class NewtonTrace:
    """Iterations of the accepted attempt plus a log of every attempt."""

    x: float
    y0: float
    eps0: float = 0.0
    n_coeff: float = 0.0
    iterations: List[NewtonIterate] = field(default_factory=list)
    converged: bool = False
    monotone: bool = True
    safeguarded: bool = False
    attempts: List[dict] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(it) for it in self.iterations], columns=["k", "y", "residual", "dp", "eps"])


def initial_guess(x: float, strategy: Y0Strategy = "li") -> float:
    if x < 2:
        raise DomainError("initial_guess", f"x must be >= 2, got {x}")
    if strategy == "li":
        return li(x)
    if strategy == "x_over_lnx":
        return x / log(x)
    if strategy == "riemann_R":
        return riemann_R(x)
    raise DomainError("initial_guess", f"unknown strategy '{strategy}'")


def regularizer(dp: float, n_resid: float) -> float:
    """
    Root eps >= 0 of eps (eps + dp) = n_resid, evaluated without cancellation.
    """
    if n_resid <= 0.0:
        return 0.0
    root = sqrt(dp * dp + 4.0 * n_resid)
    if dp >= 0.0:
        return 2.0 * n_resid / (root + dp)
    return 0.5 * (root - dp)


def _attempt(
    x: float,
    y0: float,
    eps0: float,
    p: Callable[[float], float],
    dp: Callable[[float], float],
    cfg: NewtonConfig,
    tol: float,
    monotone: bool,
    safeguard: bool,
    lower: float,
) -> Tuple[float, NewtonTrace, str]:
    trace = NewtonTrace(x=x, y0=y0, eps0=eps0, safeguarded=safeguard)
    y = y0
    r = p(y) - x
    trace.n_coeff = (eps0 * eps0 + eps0 * dp(y0)) / abs(r)
    lo, hi = -inf, inf

    for k in range(cfg.max_iter):
        if abs(r) <= tol:
            trace.converged = True
            return y, trace, "converged"
        if r < 0:
            lo = max(lo, y)
        else:
            hi = min(hi, y)

        d = dp(y)
        eps = regularizer(d, trace.n_coeff * abs(r))
        trace.iterations.append(NewtonIterate(k=k, y=y, residual=r, dp=d, eps=eps))
        denom = d + eps
        if denom < NEWTON_DIVISION_GUARD:
            return y, trace, "division guard"

        y_new = y - r / denom
        y_new = max(y_new, lower)
        if safeguard and isfinite(lo) and isfinite(hi) and not lo < y_new < hi:
            y_new = 0.5 * (lo + hi)
        r_new = p(y_new) - x
        if not isfinite(r_new):
            return y, trace, "non-finite residual"
        if abs(r_new) >= abs(r):
            trace.monotone = False
            if monotone:
                return y, trace, "residual increased"
        y, r = y_new, r_new

    if abs(r) <= tol:
        trace.converged = True
        return y, trace, "converged"
    return y, trace, "max_iter"


def newton_inverse(
    x: float,
    p: Callable[[float], float],
    dp: Callable[[float], float],
    cfg: Optional[NewtonConfig] = None,
    lower: float = 0.0,
) -> Tuple[float, NewtonTrace]:
    """
    Solve p(y) = x, escalating eps0 along the ladder. When every rung is
    rejected for a growing residual, the largest rung is rerun with a
    bracketing safeguard and without the monotonicity requirement. Iterates are
    clamped at lower, the left end of the domain of p.
    """
    cfg = cfg or NewtonConfig()
    y0 = initial_guess(x, cfg.y0_strategy)
    tol = cfg.tol_resid * max(1.0, abs(x))

    r0 = p(y0) - x
    if r0 == 0.0:
        return y0, NewtonTrace(x=x, y0=y0, eps0=cfg.eps0, converged=True)

    attempts: List[dict] = []
    passes = [(eps0, cfg.enforce_monotone, False) for eps0 in cfg.rungs()]
    if cfg.enforce_monotone:
        passes.append((cfg.rungs()[-1], False, True))

    for eps0, monotone, safeguard in passes:
        y, trace, outcome = _attempt(x, y0, eps0, p, dp, cfg, tol, monotone, safeguard, lower)
        attempts.append(
            {"eps0": eps0, "outcome": outcome, "iterations": len(trace.iterations), "safeguarded": safeguard}
        )
        if trace.converged:
            trace.attempts = attempts
            if len(attempts) > 1:
                logger.debug(f"Newton for x={x} accepted eps0={eps0} after {len(attempts)} attempts")
            return y, trace
        logger.debug(f"Newton attempt for x={x} with eps0={eps0} stopped: {outcome}")

    trace.attempts = attempts
    logger.warning(f"Newton inversion failed for x={x} after {len(attempts)} attempts")
    raise ConvergenceError(x, "eps0 ladder exhausted", trace)
