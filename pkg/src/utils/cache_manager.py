"""
Caching layer for constructed PrimeFunction facades.

Building a facade sieves (or loads and validates) a prime table and sews the
asymptote, so the CLI and the HTTP routes share instances through this cache.
"""

import hashlib
import json
from datetime import datetime, timedelta
from typing import Any, Dict, Optional

from src.config.settings import settings
from src.ingestion.prime_source import PrimeTable, load, sieve
from src.inversion.facade import PrimeFunction
from src.inversion.newton import NewtonConfig
from src.utils.logger import get_logger

logger = get_logger(__name__)


def load_table(primes_file: Optional[str] = None, sieve_limit: Optional[int] = None) -> PrimeTable:
    """Table from a prime file when given, otherwise from a sieve."""
    if primes_file:
        return load(primes_file)
    return sieve(sieve_limit or settings.default_sieve_limit)


class CacheManager:
    """In-memory facade cache with TTL support."""

    def __init__(self, max_size: int = 8, default_ttl_seconds: int = 3600):
        """
        Initialize cache manager.

        Args:
            max_size: Maximum number of facades to keep
            default_ttl_seconds: Time-to-live for cache entries
        """
        self.cache: Dict[str, Dict[str, Any]] = {}
        self.max_size = max_size
        self.default_ttl = default_ttl_seconds
        self.hits = 0
        self.misses = 0

    def _generate_key(self, primes_file: Optional[str], sieve_limit: Optional[int], spline: str) -> str:
        """Generate cache key from the prime source and spline kind."""
        cache_input = json.dumps(
            {
                "primes_file": primes_file,
                "sieve_limit": None if primes_file else (sieve_limit or settings.default_sieve_limit),
                "spline": spline,
            },
            sort_keys=True,
        )
        return hashlib.md5(cache_input.encode()).hexdigest()

    def get_function(
        self,
        primes_file: Optional[str] = None,
        sieve_limit: Optional[int] = None,
        spline: str = "quad",
    ) -> PrimeFunction:
        """Cached facade for the source, built on a miss."""
        key = self._generate_key(primes_file, sieve_limit, spline)
        entry = self.cache.get(key)

        if entry is not None and datetime.utcnow() <= entry["expires_at"]:
            self.hits += 1
            logger.debug(f"Cache hit for facade {key}")
            return entry["data"]
        if entry is not None:
            del self.cache[key]
            logger.debug(f"Cache entry expired: {key}")

        self.misses += 1
        newton = NewtonConfig(eps0=settings.newton_eps0, max_iter=settings.newton_max_iter)
        function = PrimeFunction(load_table(primes_file, sieve_limit), spline=spline, newton_config=newton)
        self.set(key, function)
        return function

    def set(self, key: str, function: PrimeFunction, ttl_seconds: Optional[int] = None) -> None:
        if len(self.cache) >= self.max_size:
            self._evict_oldest()

        ttl = ttl_seconds or self.default_ttl
        self.cache[key] = {
            "data": function,
            "created_at": datetime.utcnow(),
            "expires_at": datetime.utcnow() + timedelta(seconds=ttl),
        }
        logger.debug(f"Cached {function!r} (TTL: {ttl}s)")

    def _evict_oldest(self) -> None:
        """Evict oldest entry when cache is full."""
        if not self.cache:
            return

        oldest_key = min(self.cache.keys(), key=lambda k: self.cache[k]["created_at"])
        del self.cache[oldest_key]
        logger.debug(f"Evicted oldest cache entry: {oldest_key}")

    def clear(self) -> None:
        """Clear all cache entries."""
        self.cache.clear()
        logger.info("Cache cleared")

    def get_stats(self) -> Dict[str, Any]:
        """Get cache statistics."""
        total = self.hits + self.misses
        hit_rate = (self.hits / total * 100) if total > 0 else 0

        return {
            "size": len(self.cache),
            "max_size": self.max_size,
            "hits": self.hits,
            "misses": self.misses,
            "hit_rate": f"{hit_rate:.2f}%",
            "total_requests": total,
            "entries": [repr(entry["data"]) for entry in self.cache.values()],
        }


# Global cache instance
_cache_manager = CacheManager(max_size=settings.cache_max_size, default_ttl_seconds=settings.cache_ttl)


def get_cache_manager() -> CacheManager:
    """Get the global cache manager instance."""
    return _cache_manager
