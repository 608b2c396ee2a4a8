from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from alcove_kit.farey import (
    IntervalType, classify_intervals, excluded_multiple, farey_neighbours, farey_sequence,
    interval_counts_table, interval_of, is_admissible, k_index,
)


def brute_farey(n):
    return sorted({Fraction(p, q) for q in range(1, n + 1) for p in range(q + 1)})


@pytest.mark.parametrize("n", range(1, 13))
def test_farey_sequence_matches_brute_force(n):
    assert farey_sequence(n) == brute_farey(n)


@given(st.integers(2, 40).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1))))
def test_neighbours(args):
    n, kappa = args
    if gcd(kappa, n) != 1:
        with pytest.raises(ValueError):
            farey_neighbours(kappa, n)
        return
    seq = farey_sequence(n)
    i = seq.index(Fraction(kappa, n))
    assert farey_neighbours(kappa, n) == (seq[i - 1], seq[i + 1])


@pytest.mark.parametrize("n", range(3, 16))
def test_intervals_tile_half(n):
    ivs = classify_intervals(n)
    assert ivs[0].lower == 0 and ivs[-1].upper == Fraction(1, 2)
    for a, b in zip(ivs, ivs[1:]):
        assert a.upper == b.lower
    for iv in ivs:
        touches = any(e.denominator == n for e in (iv.lower, iv.upper))
        assert (iv.interval_type is IntervalType.TypeI) == touches
        assert iv.k_index == k_index(iv.midpoint, n)


def test_counts_small():
    # n=4: 0 < 1/4 < 1/3 < 1/2, type i on both sides of 1/4
    assert interval_counts_table(4, 4) == [(4, 2, 1)]


@given(st.integers(3, 20), st.fractions(min_value=0, max_value=1, max_denominator=200))
def test_admissibility(n, x):
    if not 0 < x < 1:
        with pytest.raises(ValueError):
            is_admissible(x, n)
        return
    bad = any((m * x).denominator == 1 for m in range(1, n + 1))
    assert is_admissible(x, n) == (not bad)
    assert (excluded_multiple(x, n) is not None) == bad
    if not bad:
        iv = interval_of(x, n)
        assert iv.contains(x) and iv.order_n == n


def test_interval_of_rejects_excluded():
    with pytest.raises(ValueError):
        interval_of(Fraction(1, 3), 6)
