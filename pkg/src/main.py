"""
primespline HTTP entry point.

Serves prime spline evaluation, inversion, coefficient tables and the
Diophantine search over the same facades the CLI uses.
"""

from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from src.api.error_handlers import PrimeSplineError, handle_exception
from src.api.routes import router
from src.config.settings import settings
from src.utils.logger import get_logger

logger = get_logger(__name__)

ALLOWED_ORIGINS = [o.strip() for o in settings.allowed_origins.split(",") if o.strip()]


# ==================== LIFESPAN & STARTUP ====================

@asynccontextmanager
async def lifespan(app: FastAPI):
    """Manage startup and shutdown events."""
    logger.info(f"{settings.app_name} {settings.version} starting up...")
    logger.info(f"Environment: {settings.environment}")
    logger.info(f"Log Level: {settings.log_level}")
    logger.info(f"Prime source: {settings.primes_file or f'sieve up to {settings.default_sieve_limit}'}")

    yield

    logger.info(f"{settings.app_name} shutting down...")


# ==================== FASTAPI APP ====================

app = FastAPI(
    title="primespline",
    version=settings.version,
    description="Prime-interpolating splines, their inverses and a prime-constrained Diophantine solver",
    lifespan=lifespan,
)


# ==================== MIDDLEWARE ====================

app.add_middleware(
    CORSMiddleware,
    allow_origins=ALLOWED_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# ==================== EXCEPTION HANDLERS ====================

@app.exception_handler(PrimeSplineError)
async def primespline_exception_handler(request, exc: PrimeSplineError):
    logger.error(f"{exc.error_code}: {exc.message}")
    return JSONResponse(status_code=exc.status_code, content=exc.to_dict())


@app.exception_handler(Exception)
async def general_exception_handler(request, exc: Exception):
    """Handle all other exceptions."""
    return JSONResponse(status_code=500, content=handle_exception(exc))


# ==================== INCLUDE ROUTES ====================

app.include_router(router)


def run(host: str = None, port: int = None) -> None:
    import uvicorn

    uvicorn.run(app, host=host or settings.host, port=port or settings.port)


if __name__ == "__main__":
    run()
