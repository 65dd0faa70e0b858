"""
Tests for prime table construction and ingestion.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.api.error_handlers import DomainError, IndexOutOfRangeError, PrimeFormatError
from src.ingestion.prime_source import PrimeTable, dumps, load, sieve, write


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


# ==================== SIEVE ====================

def test_sieve_up_to_100(small_table):
    """All 25 primes up to 100, 1-based."""
    assert len(small_table) == 25
    assert small_table.prime_at(1) == 2
    assert small_table.prime_at(25) == 97
    assert list(small_table)[:6] == [2, 3, 5, 7, 11, 13]


@pytest.mark.parametrize("limit,count", [(2, 1), (3, 2), (10, 4), (1000, 168), (7919, 1000), (10**6, 78498)])
def test_sieve_counts(limit, count):
    """pi(limit) for a few classical values."""
    table = sieve(limit)
    assert len(table) == count
    assert table.limit == limit


def test_sieve_rejects_small_limit():
    with pytest.raises(DomainError):
        sieve(1)


def test_table_is_read_only(small_table):
    with pytest.raises(ValueError):
        small_table.primes[0] = 4


@given(st.integers(min_value=2, max_value=1000))
@settings(max_examples=60, deadline=None)
def test_count_upto_matches_trial_division(x):
    table = sieve(1000)
    assert table.count_upto(x) == sum(1 for n in range(2, x + 1) if _is_prime(n))


def test_count_upto_beyond_limit(small_table):
    with pytest.raises(DomainError):
        small_table.count_upto(101)


@pytest.mark.parametrize("index", [0, 26, -1])
def test_prime_at_out_of_range(small_table, index):
    with pytest.raises(IndexOutOfRangeError):
        small_table.prime_at(index)


def test_contains(small_table):
    assert small_table.contains(97)
    assert not small_table.contains(91)
    assert not small_table.contains(101)


def test_head(table_1000):
    """The first n primes keep their own limit."""
    head = table_1000.head(25)
    assert head == sieve(97)
    assert head.limit == 97
    with pytest.raises(IndexOutOfRangeError):
        table_1000.head(1001)


def test_midpoints(small_table):
    assert small_table.midpoints[0] == 2.5
    assert small_table.midpoints[2] == 6.0


# ==================== FILE FORMAT ====================

def test_write_then_load(tmp_path, small_table):
    path = tmp_path / "primes.txt"
    write(small_table, path)
    loaded = load(path)
    np.testing.assert_array_equal(loaded.primes, small_table.primes)
    assert loaded.limit == 97
    assert loaded.source == f"file:{path}"


def test_dumps_header_and_layout(small_table):
    lines = dumps(small_table, per_line=10).splitlines()
    assert lines[0].startswith("#")
    assert lines[1].split() == ["2", "3", "5", "7", "11", "13", "17", "19", "23", "29"]
    assert len(lines) == 4


def test_load_skips_comments(tmp_path):
    path = tmp_path / "primes.txt"
    path.write_text("# header\n2 3\n  # indented comment\n5\t7\n11\n", encoding="utf-8")
    assert list(load(path)) == [2, 3, 5, 7, 11]


@pytest.mark.parametrize(
    "content,value",
    [
        ("2 3 4 5", 4),
        ("2 5 7", 3),
        ("2 3 3 5", 3),
        ("2 3 x", "x"),
    ],
)
def test_load_names_offending_value(tmp_path, content, value):
    """Composites, gaps, repeats and junk are rejected with the bad value."""
    path = tmp_path / "bad.txt"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(PrimeFormatError) as info:
        load(path)
    assert info.value.details["value"] == value


def test_load_must_start_at_two(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3 5 7", encoding="utf-8")
    with pytest.raises(PrimeFormatError):
        load(path)


def test_load_missing_and_empty(tmp_path):
    with pytest.raises(PrimeFormatError):
        load(tmp_path / "nope.txt")
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing\n", encoding="utf-8")
    with pytest.raises(PrimeFormatError):
        load(empty)


def test_table_from_array():
    table = PrimeTable(np.array([2, 3, 5]), 6, source="manual")
    assert repr(table) == "PrimeTable(n=3, limit=6, source='manual')"
    assert table.one_based[3] == 5


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--tb=short"])
