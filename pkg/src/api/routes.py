# src/api/routes.py
"""
API Routes for primespline.
"""

import uuid
from typing import Any, Dict, Optional

from fastapi import APIRouter, HTTPException, Query

from src.api.error_handlers import PrimeSplineError, create_http_exception
from src.api.models import (
    APIInfoResponse,
    CoeffTableResponse,
    EvalRequest,
    EvalResponse,
    HealthResponse,
    PiResponse,
    SolveConfig,
    SolveResponse,
    TripletModel,
    TripletsResponse,
)
from src.config.settings import settings
from src.inversion.facade import PrimeFunction
from src.postprocessing.analysis import pi_floor
from src.solver.dioph_solver import solve_config
from src.splines.cubic_spline import violation_census
from src.splines.quad_spline import coeff_table
from src.utils.cache_manager import get_cache_manager
from src.utils.logger import get_logger
from src.utils.metrics import RequestTimer, RunMetrics, get_metrics_collector

logger = get_logger(__name__)

# Initialize router
router = APIRouter()


def get_function(spline: str = "quad") -> PrimeFunction:
    """Facade for the configured prime source."""
    return get_cache_manager().get_function(settings.primes_file, settings.default_sieve_limit, spline)


def _record(name: str, timer: RequestTimer, status_code: int = 200, error: str = None) -> None:
    get_metrics_collector().record(
        RunMetrics(name=name, processing_time_ms=timer.elapsed_ms, status_code=status_code, error=error)
    )


def _fail(request_id: str, name: str, timer: RequestTimer, exc: PrimeSplineError) -> HTTPException:
    logger.error(f"[{request_id}] {exc.error_code}: {exc.message}")
    _record(name, timer, exc.status_code, exc.error_code)
    return create_http_exception(exc)


# ==================== HEALTH & INFO ENDPOINTS ====================

@router.get("/", response_model=APIInfoResponse, tags=["Info"])
async def root():
    return APIInfoResponse(
        app_name=settings.app_name,
        version=settings.version,
        docs_url=f"http://localhost:{settings.port}/docs",
        endpoints={
            "eval": "POST /eval - p, dp, p^-1 or dp^-1 at given points",
            "pi": "GET /pi/{x} - pi(x) from the inverse spline",
            "table1": "GET /table1 - integer coefficients of the parabolic spline",
            "triplets": "GET /triplets - triplets breaking cubic monotonicity",
            "solve": "POST /solve - Diophantine search over integers or primes",
            "health": "GET /health - Health check",
            "metrics": "GET /metrics - Performance metrics",
            "cache_stats": "GET /cache-stats - Facade cache statistics",
        },
        features=[
            "Cubic and parabolic prime splines",
            "Closed-form and Newton inverses",
            "Deflated Gauss-Newton Diophantine solver",
            "Facade caching",
            "Request Monitoring",
        ],
    )


@router.get("/health", response_model=HealthResponse, tags=["Health"])
def health_check():
    try:
        function = get_function(settings.default_spline)
        return HealthResponse(
            status="healthy",
            message="All systems operational",
            version=settings.version,
            prime_source=function.table.source,
            table_size=len(function.table),
        )
    except PrimeSplineError as e:
        logger.warning(f"Health check failed: {e.message}")
        return HealthResponse(
            status="degraded",
            message=e.message,
            version=settings.version,
            prime_source=settings.primes_file or f"sieve:{settings.default_sieve_limit}",
            table_size=0,
        )


@router.get("/metrics", response_model=Dict[str, Any], tags=["Health"])
async def metrics(name: Optional[str] = None):
    """Summary of all runs, or the stats of one endpoint such as /eval."""
    collector = get_metrics_collector()
    return collector.get_stats(name) if name else collector.get_summary()


@router.get("/cache-stats", response_model=Dict[str, Any], tags=["Health"])
async def cache_stats():
    return get_cache_manager().get_stats()


# ==================== EVALUATION ENDPOINTS ====================

@router.post("/eval", response_model=EvalResponse, tags=["Evaluation"])
def evaluate(request: EvalRequest):
    """Evaluate one of the facade functions at every x of the request."""
    request_id = str(uuid.uuid4())
    with RequestTimer() as timer:
        try:
            function = get_function(request.spline)
            if request.fn == "p":
                values = function.p_of(request.xs)
            elif request.fn == "dp":
                values = function.dp_of(request.xs)
            elif request.fn == "pinv":
                values = function.pinv_of(request.xs, request.backend)
            else:
                values = function.dpinv_of(request.xs, request.backend)
        except PrimeSplineError as e:
            raise _fail(request_id, "/eval", timer, e)

    logger.info(f"[{request_id}] eval {request.fn} ({request.spline}) at {len(request.xs)} points")
    _record("/eval", timer)
    return EvalResponse(
        fn=request.fn,
        spline=request.spline,
        xs=request.xs,
        values=[float(v) for v in values],
        processing_time_ms=timer.elapsed_ms,
    )


@router.get("/pi/{x}", response_model=PiResponse, tags=["Evaluation"])
def prime_count(x: float):
    request_id = str(uuid.uuid4())
    with RequestTimer() as timer:
        try:
            function = get_function("quad")
            pinv = float(function.pinv_of(x))
            count = int(pi_floor(x, function))
            table_count = function.table.count_upto(x) if x <= function.table.limit else None
        except PrimeSplineError as e:
            raise _fail(request_id, "/pi", timer, e)
    _record("/pi", timer)
    return PiResponse(x=x, pinv=pinv, pi_floor=count, pi_table=table_count)


@router.get("/table1", response_model=CoeffTableResponse, tags=["Splines"])
def table1(i_from: int = Query(2, alias="from", ge=2), i_to: int = Query(20, alias="to", ge=2)):
    request_id = str(uuid.uuid4())
    with RequestTimer() as timer:
        try:
            frame = coeff_table(i_from, i_to, get_function("quad").table)
        except PrimeSplineError as e:
            raise _fail(request_id, "/table1", timer, e)
    _record("/table1", timer)
    rows = [{k: int(v) for k, v in row.items()} for row in frame.to_dict(orient="records")]
    return CoeffTableResponse(i_from=i_from, i_to=i_to, rows=rows)


@router.get("/triplets", response_model=TripletsResponse, tags=["Splines"])
def triplets(count: int = Query(1000, ge=1)):
    request_id = str(uuid.uuid4())
    with RequestTimer() as timer:
        try:
            reports = violation_census(count, get_function("quad").table)
        except PrimeSplineError as e:
            raise _fail(request_id, "/triplets", timer, e)
    _record("/triplets", timer)
    return TripletsResponse(count=count, violations=[TripletModel(**r.as_dict()) for r in reports])


# ==================== SOLVER ENDPOINTS ====================

@router.post("/solve", response_model=SolveResponse, tags=["Solver"])
def solve(config: SolveConfig):
    """
    Run the deflated multi-start search described by the config and return
    every verified tuple.
    """
    request_id = str(uuid.uuid4())
    logger.info(f"[{request_id}] Solve request: {config.preset or config.name}, penalty={config.penalty}")
    with RequestTimer() as timer:
        try:
            run = solve_config(config, get_function("quad"))
        except PrimeSplineError as e:
            raise _fail(request_id, "/solve", timer, e)

    _record("/solve", timer)
    data = run.to_dict()
    return SolveResponse(
        system=run.system,
        kind=run.kind,
        seed=run.seed,
        attempts=run.attempts,
        exhausted=run.exhausted,
        rounded=data["rounded"],
        found=data["found"],
        processing_time_ms=timer.elapsed_ms,
    )
