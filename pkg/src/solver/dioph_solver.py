"""
Multi-start deflated rgn search for all integer or prime solutions of a
polynomial system inside its domain box.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.api.error_handlers import ConfigError
from src.api.models import SolveConfig
from src.config.constants import DEDUP_RADIUS, ROUND_TOLERANCE
from src.ingestion.prime_source import PrimeTable
from src.inversion.facade import PrimeFunction
from src.solver.residuals import PRESETS, PenaltyKind, ResidualSystem, build_penalty, polynomial_system
from src.solver.rgn import RgnConfig, extractor, run_attempt
from src.utils.logger import get_logger

logger = get_logger(__name__)

IntTuple = Tuple[int, ...]


@dataclass
class FoundSolution:
    x: List[float]
    residual_norm: float
    rounded: Optional[IntTuple]
    attempt: int
    eps0: float
    iterations: int

    def as_dict(self) -> dict:
        return {
            "x": self.x,
            "residual_norm": self.residual_norm,
            "rounded": list(self.rounded) if self.rounded is not None else None,
            "attempt": self.attempt,
            "eps0": self.eps0,
            "iterations": self.iterations,
        }


@dataclass
class SolveRun:
    """Outcome of solve_all."""

    system: str
    kind: str
    seed: int
    found: List[FoundSolution] = field(default_factory=list)
    rounded: List[IntTuple] = field(default_factory=list)
    restart_log: List[dict] = field(default_factory=list)
    traces: List[List[dict]] = field(default_factory=list)
    attempts: int = 0
    exhausted: bool = False

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "kind": self.kind,
            "seed": self.seed,
            "attempts": self.attempts,
            "exhausted": self.exhausted,
            "found": [s.as_dict() for s in self.found],
            "rounded": [list(t) for t in self.rounded],
            "restart_log": self.restart_log,
            "traces": self.traces,
        }


# ==================== VERIFICATION ====================


def verify_rounded(
    x: Sequence[float],
    system: ResidualSystem,
    kind: Optional[PenaltyKind] = None,
    table: Optional[PrimeTable] = None,
    tol: float = ROUND_TOLERANCE,
) -> Optional[IntTuple]:
    """
    Round x to the nearest integer point and keep it only if every
    coordinate was within tol of an integer, the point lies in the box, every
    coordinate is prime (primes mode) and the base equations hold exactly.
    """
    kind = PenaltyKind(kind) if kind is not None else system.kind
    arr = np.asarray(x, dtype=np.float64)
    nearest = np.rint(arr)
    if not np.isfinite(arr).all() or np.abs(arr - nearest).max() > tol:
        return None

    point = tuple(int(v) for v in nearest)
    if not system.contains(nearest):
        return None
    if kind == PenaltyKind.PRIMES:
        if table is None:
            if system.penalty is None or system.penalty.function is None:
                raise ConfigError("table", "primes verification needs a prime table")
            table = system.penalty.function.table
        if not all(table.contains(v) for v in point):
            return None
    if not system.exact_check(point):
        return None
    return point


# ==================== SEARCH ====================


def solve_all(
    system: ResidualSystem,
    kind: PenaltyKind,
    cfg: RgnConfig,
    function: Optional[PrimeFunction] = None,
) -> SolveRun:
    """
    Repeated rounds of multi-start rgn on the deflated system. Each round ends
    at its first new solution; the search stops when a round of cfg.restarts
    attempts finds nothing new or cfg.max_extractions solutions are held.
    """
    kind = PenaltyKind(kind)
    if system.kind != kind:
        system = build_penalty(system, kind, function)

    rng = np.random.default_rng(cfg.rng_seed)
    lower, upper = np.asarray(system.lower), np.asarray(system.upper)
    schedule = cfg.eps0_schedule()
    run = SolveRun(system=system.name, kind=kind.value, seed=cfg.rng_seed)
    deflation: List[np.ndarray] = []
    seen = set()

    logger.info(
        f"Solving {system.name} ({kind.value}) over {system.lower}..{system.upper}: "
        f"restarts={cfg.restarts}, max_extractions={cfg.max_extractions}, seed={cfg.rng_seed}"
    )

    round_no = 0
    while len(run.found) < cfg.max_extractions:
        new_solution = False
        for _ in range(cfg.restarts):
            index = run.attempts
            if index == 0 and cfg.x0 is not None:
                x0 = np.asarray(cfg.x0, dtype=np.float64)
            else:
                x0 = rng.uniform(lower, upper)
            eps0 = schedule[index % len(schedule)]
            run.attempts += 1

            attempt = run_attempt(system, x0, eps0, cfg, deflation)
            entry = {
                "attempt": index,
                "round": round_no,
                "eps0": eps0,
                "status": attempt.status,
                "iterations": len(attempt.iterations),
                "rho": attempt.rho,
                "accepted": False,
            }
            run.restart_log.append(entry)

            candidate = _accept(attempt, system, kind, deflation, seen, cfg)
            if candidate is None:
                continue

            rounded, point = candidate
            entry["accepted"] = True
            deflation.append(point)
            run.found.append(
                FoundSolution(
                    x=attempt.x.tolist(),
                    residual_norm=float(np.abs(system.residual(attempt.x)).max()),
                    rounded=rounded,
                    attempt=index,
                    eps0=eps0,
                    iterations=len(attempt.iterations),
                )
            )
            if rounded is not None:
                seen.add(rounded)
                run.rounded.append(rounded)
            run.traces.append([it.as_dict() for it in attempt.iterations])
            logger.info(f"Extraction {len(run.found)}: {rounded or attempt.x.tolist()} after {index + 1} attempts")
            new_solution = True
            break

        round_no += 1
        if not new_solution:
            run.exhausted = True
            logger.info(f"Round {round_no} found nothing new; stopping with {len(run.found)} solutions")
            break

    return run


def _accept(attempt, system, kind, deflation, seen, cfg):
    """Return (rounded tuple or None, deflation point) for a new solution, else None."""
    if attempt.status == "solver_error":
        return None
    if any(np.linalg.norm(attempt.x - p) < DEDUP_RADIUS for p in deflation):
        return None

    if kind == PenaltyKind.NONE:
        if not attempt.converged or float(np.abs(system.residual(attempt.x)).max()) > np.sqrt(cfg.tol_F):
            return None
        rounded = verify_rounded(attempt.x, system, kind, tol=cfg.round_tolerance)
        return rounded, attempt.x.copy()

    rounded = verify_rounded(attempt.x, system, kind, tol=cfg.round_tolerance)
    if rounded is None:
        logger.debug(f"Attempt ended at {attempt.x.tolist()} ({attempt.status}) without a verified point")
        return None
    if rounded in seen:
        return None
    return rounded, np.asarray(rounded, dtype=np.float64)


def deflated_norm(system: ResidualSystem, x: Sequence[float], found: Sequence[np.ndarray]) -> float:
    """||F x||_inf with the extractors of found applied."""
    arr = np.asarray(x, dtype=np.float64)
    return float(extractor(arr, found) * np.abs(system.jac(arr).T @ system.residual(arr)).max())


# ==================== ORACLES ====================


def _candidates(system: ResidualSystem, kind: PenaltyKind, table: Optional[PrimeTable]) -> List[np.ndarray]:
    axes = []
    for lo, hi in zip(system.lower, system.upper):
        if kind == PenaltyKind.PRIMES:
            primes = table.primes
            axes.append(primes[(primes >= lo) & (primes <= hi)])
        else:
            axes.append(np.arange(int(np.ceil(lo)), int(np.floor(hi)) + 1, dtype=np.int64))
    return axes


def brute_force(
    system: ResidualSystem, kind: PenaltyKind = PenaltyKind.PRIMES, table: Optional[PrimeTable] = None
) -> List[IntTuple]:
    """Every integer (or prime) point of the box solving the base equations, sorted."""
    kind = PenaltyKind(kind)
    if kind == PenaltyKind.NONE:
        raise ConfigError("penalty", "brute force needs integers or primes")
    if kind == PenaltyKind.PRIMES and table is None:
        raise ConfigError("table", "brute force over primes needs a prime table")

    axes = _candidates(system, kind, table)
    if any(axis.size == 0 for axis in axes):
        return []
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)

    mask = np.ones(points.shape[0], dtype=bool)
    as_float = points.astype(np.float64)
    for eq in system.equations:
        mask &= np.abs(eq.value_many(as_float) - eq.target) < 0.5

    hits = [tuple(int(v) for v in row) for row in points[mask]]
    solutions = sorted(p for p in hits if system.exact_check(p))
    logger.debug(f"Brute force over {points.shape[0]} points of {system.name}: {len(solutions)} solutions")
    return solutions


def known_series(n: int, which: int = 1) -> IntTuple:
    """
    Integer solutions of x1^2 + x2^2 = x3^2 + 1:
    which=1: (2n+1, n^2+n-1, n^2+n+1); which=2: (2n(4n+1), 16n^3-1, 16n^3+2n).
    """
    if n < 1:
        raise ConfigError("n", f"must be >= 1, got {n}")
    if which == 1:
        return (2 * n + 1, n * n + n - 1, n * n + n + 1)
    if which == 2:
        return (2 * n * (4 * n + 1), 16 * n**3 - 1, 16 * n**3 + 2 * n)
    raise ConfigError("which", f"series must be 1 or 2, got {which}")


# ==================== CONFIG ====================


def system_from_config(config: SolveConfig) -> Tuple[ResidualSystem, RgnConfig]:
    """Base system and rgn settings described by a validated SolveConfig."""
    if config.preset is not None:
        system = PRESETS[config.preset](config.lower, config.upper)
    else:
        equations = [eq.model_dump() for eq in config.equations]
        system = polynomial_system(config.name, equations, config.lower, config.upper, config.variables)

    if config.x0 is not None and len(config.x0) != system.n:
        raise ConfigError("x0", f"expected {system.n} values, got {len(config.x0)}")

    rgn = RgnConfig(
        eps0=config.eps0,
        max_iter=config.max_iter,
        restarts=config.restarts,
        rng_seed=config.seed,
        max_extractions=config.max_extractions,
        scaling=config.scaling,
        x0=config.x0,
    )
    return system, rgn


def solve_config(config: SolveConfig, function: Optional[PrimeFunction] = None) -> SolveRun:
    system, rgn = system_from_config(config)
    return solve_all(system, PenaltyKind(config.penalty), rgn, function)
