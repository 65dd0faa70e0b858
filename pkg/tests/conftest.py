"""
Shared fixtures: prime tables and facades are built once per session.
"""

import os

# must be set before src is imported: settings are read once and configure the logger
os.environ.setdefault("PRIMESPLINE_LOG_TO_FILE", "false")
os.environ.setdefault("LOG_LEVEL", "WARNING")
os.environ.setdefault("PRIMESPLINE_SIEVE_LIMIT", "100000")

import pytest

from src.ingestion.prime_source import sieve
from src.inversion.facade import PrimeFunction
from src.utils.cache_manager import get_cache_manager
from src.utils.metrics import get_metrics_collector

# p(1000) = 7919, p(10000) = 104729
P_1000 = 7919
P_10000 = 104729


@pytest.fixture(scope="session")
def small_table():
    """The 25 primes up to 100."""
    return sieve(100)


@pytest.fixture(scope="session")
def table_1000():
    return sieve(P_1000)


@pytest.fixture(scope="session")
def table_10k():
    return sieve(P_10000)


@pytest.fixture(scope="session")
def quad_function(table_1000):
    return PrimeFunction(table_1000, spline="quad")


@pytest.fixture(scope="session")
def cubic_function(table_1000):
    return PrimeFunction(table_1000, spline="cubic")


@pytest.fixture(scope="session")
def function_10k(table_10k):
    return PrimeFunction(table_10k, spline="quad")


@pytest.fixture
def reset_state():
    """Empty facade cache and metrics around a test."""
    get_cache_manager().clear()
    get_metrics_collector().reset()
    yield
    get_metrics_collector().reset()
