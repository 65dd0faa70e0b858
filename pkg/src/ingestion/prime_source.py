"""
Prime table construction: Eratosthenes sieve, file ingestion and indexed access.

All public indices are 1-based, so ``prime_at(1) == 2``.
"""

from math import isqrt
from pathlib import Path
from typing import Iterator, Union

import numpy as np

from src.api.error_handlers import DomainError, IndexOutOfRangeError, PrimeFormatError
from src.utils.logger import get_logger

logger = get_logger(__name__)


class PrimeTable:
    """Immutable, strictly increasing list of all primes up to ``limit``."""

    __slots__ = ("_primes", "_padded", "_limit", "_source", "_midpoints")

    def __init__(self, primes: np.ndarray, limit: int, source: str = "sieve"):
        primes = np.asarray(primes, dtype=np.int64)
        primes.flags.writeable = False
        padded = np.concatenate(([0], primes))
        padded.flags.writeable = False
        self._primes = primes
        self._padded = padded
        self._limit = int(limit)
        self._source = source
        self._midpoints = None

    def __len__(self) -> int:
        return int(self._primes.size)

    def __iter__(self) -> Iterator[int]:
        return (int(p) for p in self._primes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PrimeTable):
            return NotImplemented
        return self._limit == other._limit and np.array_equal(self._primes, other._primes)

    def __repr__(self) -> str:
        return f"PrimeTable(n={len(self)}, limit={self._limit}, source={self._source!r})"

    @property
    def limit(self) -> int:
        return self._limit

    @property
    def source(self) -> str:
        return self._source

    @property
    def primes(self) -> np.ndarray:
        """Read-only 0-based array of the primes."""
        return self._primes

    @property
    def one_based(self) -> np.ndarray:
        """Read-only array with ``one_based[i] == p(i)``; slot 0 holds 0."""
        return self._padded

    @property
    def midpoints(self) -> np.ndarray:
        """Read-only array m with m[j] = (p(j+1) + p(j+2)) / 2, built on first use."""
        if self._midpoints is None:
            mids = 0.5 * (self._primes[:-1] + self._primes[1:])
            mids.flags.writeable = False
            self._midpoints = mids
        return self._midpoints

    def prime_at(self, i: int) -> int:
        """Return p(i) for 1 <= i <= len(table)."""
        if not 1 <= i <= len(self):
            raise IndexOutOfRangeError(i, 1, len(self))
        return int(self._padded[i])

    def count_upto(self, x: float) -> int:
        """Exact pi(x) for x no larger than the table limit."""
        if x > self._limit:
            raise DomainError("count_upto", f"x={x} beyond table limit {self._limit}")
        return int(np.searchsorted(self._primes, x, side="right"))

    def head(self, n: int) -> "PrimeTable":
        """Table of the first n primes."""
        if not 1 <= n <= len(self):
            raise IndexOutOfRangeError(n, 1, len(self))
        return PrimeTable(self._primes[:n], int(self._primes[n - 1]), source=f"{self._source}[:{n}]")

    def contains(self, n: int) -> bool:
        """True when the integer n is a prime held by the table."""
        k = int(np.searchsorted(self._primes, n, side="left"))
        return k < len(self) and int(self._primes[k]) == n


def sieve(limit: int) -> PrimeTable:
    """
    Generate all primes <= limit with an odd-only Eratosthenes sieve.

    Args:
        limit: Largest integer to sieve, at least 2

    Returns:
        PrimeTable holding every prime up to limit
    """
    if limit < 2:
        raise DomainError("sieve", f"limit must be >= 2, got {limit}")

    # slot k stands for the odd number 2k + 3
    size = (limit - 1) // 2
    is_odd_prime = np.ones(size, dtype=bool)
    for k in range((isqrt(limit) - 3) // 2 + 1):
        if is_odd_prime[k]:
            p = 2 * k + 3
            is_odd_prime[(p * p - 3) // 2 :: p] = False

    primes = np.concatenate((np.array([2], dtype=np.int64), 2 * np.flatnonzero(is_odd_prime) + 3))
    logger.debug(f"Sieved {primes.size} primes up to {limit}")
    return PrimeTable(primes, limit, source=f"sieve:{limit}")


def load(path: Union[str, Path]) -> PrimeTable:
    """
    Read a whitespace-separated prime list, skipping '#' comment lines.

    The list must start at 2, increase strictly, contain only primes and
    miss no prime up to its largest entry.
    """
    path = Path(path)
    if not path.exists():
        raise PrimeFormatError(str(path), "file does not exist")

    tokens = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.lstrip().startswith("#"):
            continue
        tokens.extend(line.split())
    if not tokens:
        raise PrimeFormatError(str(path), "no values found")

    values = []
    for token in tokens:
        try:
            values.append(int(token))
        except ValueError:
            raise PrimeFormatError(str(path), f"'{token}' is not an integer", token) from None

    arr = np.array(values, dtype=np.int64)
    steps = np.diff(arr)
    if steps.size and (steps <= 0).any():
        bad = int(arr[int(np.argmax(steps <= 0)) + 1])
        raise PrimeFormatError(str(path), f"sequence not strictly increasing at {bad}", bad)

    reference = sieve(int(arr[-1])) if arr[-1] >= 2 else None
    ref_primes = reference.primes if reference is not None else np.empty(0, dtype=np.int64)

    composite = ~np.isin(arr, ref_primes)
    if composite.any():
        bad = int(arr[int(np.argmax(composite))])
        raise PrimeFormatError(str(path), f"{bad} is not prime", bad)

    missing = ~np.isin(ref_primes, arr)
    if missing.any():
        bad = int(ref_primes[int(np.argmax(missing))])
        raise PrimeFormatError(str(path), f"prime {bad} is missing", bad)

    logger.info(f"Loaded {arr.size} primes from {path}")
    return PrimeTable(arr, int(arr[-1]), source=f"file:{path}")


def dumps(table: PrimeTable, per_line: int = 10) -> str:
    """Text in the format accepted by ``load``."""
    lines = [f"# {len(table)} primes up to {table.limit}"]
    primes = table.primes
    for start in range(0, len(primes), per_line):
        lines.append(" ".join(str(int(p)) for p in primes[start : start + per_line]))
    return "\n".join(lines) + "\n"


def write(table: PrimeTable, path: Union[str, Path], per_line: int = 10) -> None:
    """Write a table in the format accepted by ``load``."""
    Path(path).write_text(dumps(table, per_line), encoding="utf-8")
