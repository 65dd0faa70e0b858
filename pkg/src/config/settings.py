"""
Configuration module for primespline.
Settings are read from the environment and an optional .env file.
"""

import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings

load_dotenv()


class Settings(BaseSettings):
    """Application settings."""

    # Application
    app_name: str = "primespline"
    version: str = "1.0.0"
    environment: str = os.getenv("ENVIRONMENT", "development")
    host: str = os.getenv("HOST", "0.0.0.0")
    port: int = int(os.getenv("PORT", 8000))
    log_level: str = os.getenv("LOG_LEVEL", "INFO")
    log_to_file: bool = os.getenv("PRIMESPLINE_LOG_TO_FILE", "true").lower() == "true"
    log_dir: str = os.getenv("PRIMESPLINE_LOG_DIR", "logs")
    allowed_origins: str = os.getenv(
        "ALLOWED_ORIGINS", "http://localhost:3000,http://localhost:8000"
    )

    # Prime source
    primes_file: Optional[str] = os.getenv("PRIMESPLINE_PRIMES", None)
    default_sieve_limit: int = Field(
        int(os.getenv("PRIMESPLINE_SIEVE_LIMIT", 1_000_000)), ge=2
    )
    default_spline: str = os.getenv("PRIMESPLINE_SPLINE", "quad")

    # Newton inversion
    newton_eps0: float = Field(float(os.getenv("PRIMESPLINE_NEWTON_EPS0", 1e-6)), gt=0)
    newton_max_iter: int = Field(int(os.getenv("PRIMESPLINE_NEWTON_MAX_ITER", 100)), ge=1)

    # Diophantine solver
    rgn_max_iter: int = Field(int(os.getenv("PRIMESPLINE_RGN_MAX_ITER", 200)), ge=1)
    rgn_restarts: int = Field(int(os.getenv("PRIMESPLINE_RGN_RESTARTS", 300)), ge=1)
    rgn_max_extractions: int = Field(
        int(os.getenv("PRIMESPLINE_RGN_MAX_EXTRACTIONS", 20)), ge=1, le=20
    )

    # Cache
    cache_ttl: int = int(os.getenv("CACHE_TTL", 3600))
    cache_max_size: int = int(os.getenv("CACHE_MAX_SIZE", 8))

    class Config:
        env_file = ".env"
        case_sensitive = False
        extra = "ignore"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


# Export
settings = get_settings()
