"""
Autoregularized Gauss-Newton (rgn) iteration with deflation.

At x_k the linear problem

    (J^T J + eps_k I) (x_{k+1} - x_k) = -F x_k,    F x = M(x) J^T (f(x) - y)

is solved through the SVD of J. M(x) is the product of the extractors of the
solutions found so far (1 before the first extraction) and

    eps_k = (sqrt(tau_k^2 + 4 N rho_k) - tau_k) / 2,   tau_k = ||J^T J||_inf,
    rho_k = ||F x_k||_inf,   N = (eps0 + eps0 tau_0) / rho_0.
"""

from dataclasses import dataclass, field
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, validator

from src.api.error_handlers import SolverError
from src.config.constants import (
    DEDUP_RADIUS,
    EXTRACTOR_CAP,
    RGN_EPS0_TABLE,
    RGN_MAX_EXTRACTIONS,
    RGN_TOL_F,
    RGN_TOL_STEP,
    ROUND_TOLERANCE,
    SVD_RELATIVE_CUTOFF,
)
from src.inversion.newton import regularizer
from src.solver.residuals import ResidualSystem
from src.utils.logger import get_logger

logger = get_logger(__name__)


class RgnConfig(BaseModel):
    """Settings of a multi-start rgn search."""

    eps0: float = Field(1e-2, gt=0, description="Regularizer of the first attempt")
    eps0_table: Tuple[float, ...] = RGN_EPS0_TABLE
    max_iter: int = Field(200, ge=1, le=100_000)
    tol_F: float = Field(RGN_TOL_F, gt=0)
    tol_step: float = Field(RGN_TOL_STEP, gt=0)
    restarts: int = Field(300, ge=1, description="Attempts per extraction round")
    rng_seed: int = 0
    max_extractions: int = Field(RGN_MAX_EXTRACTIONS, ge=1, le=RGN_MAX_EXTRACTIONS)
    scaling: Literal["off", "column_norm"] = "off"
    round_tolerance: float = Field(ROUND_TOLERANCE, gt=0, lt=0.5)
    x0: Optional[List[float]] = None

    @validator("eps0_table")
    def table_positive(cls, v):
        if not v or any(e <= 0 for e in v):
            raise ValueError("eps0_table must hold positive values")
        return tuple(v)

    def eps0_schedule(self) -> Tuple[float, ...]:
        return (self.eps0,) + tuple(e for e in self.eps0_table if e != self.eps0)


@dataclass
class RgnState:
    n_coeff: float
    eps0: float


@dataclass
class RgnIterate:
    k: int
    eps: float
    tau: float
    rho: float
    step: float
    multiplier: float

    def as_dict(self) -> dict:
        return vars(self).copy()


@dataclass
class RgnAttempt:
    x0: np.ndarray
    eps0: float
    x: np.ndarray
    status: str
    rho: float
    iterations: List[RgnIterate] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status == "converged"


# ==================== DEFLATION ====================


def extractor(x: np.ndarray, found: Sequence[np.ndarray]) -> float:
    """
    prod_r (1 - exp(-||x - x_r||_2))^-1 over the found solutions, capped at
    EXTRACTOR_CAP. Returns 1 when nothing has been found.
    """
    total = 1.0
    for point in found:
        dist = float(np.linalg.norm(np.asarray(x, dtype=np.float64) - point))
        if dist < DEDUP_RADIUS:
            return EXTRACTOR_CAP
        total /= -np.expm1(-dist)
        if total >= EXTRACTOR_CAP:
            return EXTRACTOR_CAP
    return total


# ==================== ONE STEP ====================


def _gradient(system: ResidualSystem, x: np.ndarray, found: Sequence[np.ndarray]):
    J = system.jac(x)
    r = system.residual(x)
    if not (np.isfinite(J).all() and np.isfinite(r).all()):
        raise SolverError("non-finite residual or Jacobian", {"x": x.tolist()})
    multiplier = extractor(x, found)
    Fx = multiplier * (J.T @ r)
    tau = float(np.abs(J.T @ J).sum(axis=1).max())
    return J, r, Fx, tau, multiplier


def initial_state(
    system: ResidualSystem, x0: np.ndarray, eps0: float, found: Sequence[np.ndarray] = ()
) -> Tuple[RgnState, float]:
    """N for an attempt started at x0, and rho_0."""
    _, _, Fx, tau0, _ = _gradient(system, x0, found)
    rho0 = float(np.abs(Fx).max())
    n_coeff = (eps0 + eps0 * tau0) / rho0 if rho0 > 0 else 0.0
    return RgnState(n_coeff=n_coeff, eps0=eps0), rho0


def rgn_step(
    system: ResidualSystem,
    x: np.ndarray,
    state: RgnState,
    found: Sequence[np.ndarray] = (),
    scaling: str = "off",
    k: int = 0,
) -> Tuple[np.ndarray, RgnIterate]:
    """One regularized step from x, projected back into the domain box."""
    J, r, Fx, tau, multiplier = _gradient(system, x, found)
    rho = float(np.abs(Fx).max())
    eps = regularizer(tau, state.n_coeff * rho)

    scale = np.ones(system.n)
    if scaling == "column_norm":
        norms = np.linalg.norm(J, axis=0)
        scale = np.where(norms > 0, norms, 1.0)
    Js = J / scale

    try:
        U, s, Vt = np.linalg.svd(Js, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"SVD failed: {exc}", {"x": x.tolist()}) from exc

    keep = s >= SVD_RELATIVE_CUTOFF * (s.max() if s.size else 0.0)
    denom = s * s + eps
    gain = np.where(keep & (denom > 0), s / np.where(denom > 0, denom, 1.0), 0.0)
    # (Js^T Js + eps I)^-1 Js^T (M r), in the row space of Js
    delta = -(Vt.T @ (gain * (U.T @ (multiplier * r)))) / scale

    x_new = system.clamp(x + delta)
    step = float(np.abs(x_new - x).max())
    return x_new, RgnIterate(k=k, eps=eps, tau=tau, rho=rho, step=step, multiplier=multiplier)


def run_attempt(
    system: ResidualSystem,
    x0: Sequence[float],
    eps0: float,
    cfg: RgnConfig,
    found: Sequence[np.ndarray] = (),
) -> RgnAttempt:
    """Iterate rgn_step from x0 until ||F x||_inf <= tol_F, a tiny step or max_iter."""
    x = system.clamp(np.asarray(x0, dtype=np.float64))
    attempt = RgnAttempt(x0=x.copy(), eps0=eps0, x=x, status="max_iter", rho=np.inf)
    try:
        state, rho = initial_state(system, x, eps0, found)
        if rho <= cfg.tol_F:
            attempt.status, attempt.rho = "converged", rho
            return attempt

        for k in range(cfg.max_iter):
            x_new, it = rgn_step(system, x, state, found, cfg.scaling, k)
            attempt.iterations.append(it)
            if it.rho <= cfg.tol_F:
                attempt.status, attempt.rho = "converged", it.rho
                break
            x = x_new
            attempt.x = x
            if it.step <= cfg.tol_step * (1.0 + float(np.abs(x).max())):
                attempt.status = "stalled"
                break

        if attempt.status != "converged":
            _, _, Fx, _, _ = _gradient(system, x, found)
            attempt.rho = float(np.abs(Fx).max())
            if attempt.rho <= cfg.tol_F:
                attempt.status = "converged"
    except SolverError as exc:
        logger.debug(f"rgn attempt from {attempt.x0.tolist()} aborted: {exc.message}")
        attempt.status = "solver_error"
    return attempt
