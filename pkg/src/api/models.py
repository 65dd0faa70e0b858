"""
Pydantic models for request/response validation and solver configuration files.
"""

from datetime import datetime
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, validator

from src.config.settings import settings

Bound = Union[float, List[float]]


# ==================== SOLVER CONFIG ====================

class TermModel(BaseModel):
    """One monomial coeff * prod x_j^powers_j."""
    coeff: int
    powers: List[int] = Field(..., min_length=1)


class EquationModel(BaseModel):
    terms: List[TermModel] = Field(..., min_length=1)
    target: int = 0


class SolveConfig(BaseModel):
    """Contents of a `solve --config` file and of POST /solve."""
    name: str = "custom"
    preset: Optional[Literal["quasi_pythagorean", "quasi_pythagorean_twin"]] = None
    variables: Optional[int] = Field(None, ge=1, le=8)
    equations: Optional[List[EquationModel]] = None
    penalty: Literal["none", "integers", "primes"] = "primes"
    lower: Bound = 2
    upper: Bound = 100
    seed: int = 0
    restarts: int = Field(settings.rgn_restarts, ge=1, le=100_000)
    max_extractions: int = Field(settings.rgn_max_extractions, ge=1, le=20)
    max_iter: int = Field(settings.rgn_max_iter, ge=1, le=100_000)
    eps0: float = Field(1e-2, gt=0)
    scaling: Literal["off", "column_norm"] = "off"
    x0: Optional[List[float]] = None

    @validator("equations", always=True)
    def preset_or_equations(cls, v, values):
        if values.get("preset") is None and not v:
            raise ValueError("either 'preset' or 'equations' is required")
        if values.get("preset") is not None and v:
            raise ValueError("'preset' and 'equations' are mutually exclusive")
        if v and values.get("variables") is None:
            raise ValueError("'variables' is required with 'equations'")
        return v

    class Config:
        json_schema_extra = {
            "example": {
                "preset": "quasi_pythagorean_twin",
                "penalty": "primes",
                "lower": 2,
                "upper": 100,
                "seed": 1,
                "restarts": 300,
                "max_extractions": 20
            }
        }


class SolveResponse(BaseModel):
    system: str
    kind: str
    seed: int
    attempts: int
    exhausted: bool
    rounded: List[List[int]] = Field(default_factory=list)
    found: List[Dict[str, Any]] = Field(default_factory=list)
    processing_time_ms: float = 0.0
    timestamp: datetime = Field(default_factory=datetime.utcnow)


# ==================== EVALUATION MODELS ====================

class EvalRequest(BaseModel):
    """Request to evaluate p, dp, p^-1 or dp^-1 at a list of points."""
    fn: Literal["p", "dp", "pinv", "dpinv"] = "p"
    spline: Literal["quad", "cubic"] = "quad"
    backend: Optional[Literal["closed", "newton"]] = None
    xs: List[float] = Field(..., min_length=1, max_length=100_000)

    class Config:
        json_schema_extra = {
            "example": {
                "fn": "pinv",
                "spline": "quad",
                "xs": [10, 97, 1000]
            }
        }


class EvalResponse(BaseModel):
    fn: str
    spline: str
    xs: List[float]
    values: List[float]
    processing_time_ms: float = 0.0
    timestamp: datetime = Field(default_factory=datetime.utcnow)


class PiResponse(BaseModel):
    """pi(x) from the smooth inverse and from the table."""
    x: float
    pinv: float
    pi_floor: int
    pi_table: Optional[int] = None


class CoeffTableResponse(BaseModel):
    i_from: int
    i_to: int
    rows: List[Dict[str, int]]


class TripletModel(BaseModel):
    i: int
    p_im1: int
    p_i: int
    p_ip1: int
    d_i: float
    violates: bool
    lower: float
    upper: float
    t_i: int


class TripletsResponse(BaseModel):
    count: int
    violations: List[TripletModel] = Field(default_factory=list)


# ==================== HEALTH & STATUS MODELS ====================

class HealthResponse(BaseModel):
    """Health check response."""
    status: str
    message: str
    version: str = "1.0.0"
    prime_source: str
    table_size: int
    timestamp: datetime = Field(default_factory=datetime.utcnow)

    class Config:
        json_schema_extra = {
            "example": {
                "status": "healthy",
                "message": "All systems operational",
                "version": "1.0.0",
                "prime_source": "sieve:1000000",
                "table_size": 78498,
                "timestamp": "2026-10-18T10:50:00"
            }
        }


class APIInfoResponse(BaseModel):
    """API information response."""
    app_name: str
    version: str
    docs_url: str
    endpoints: Dict[str, str]
    features: List[str]
