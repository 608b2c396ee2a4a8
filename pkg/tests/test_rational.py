from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alcove_kit.rational import (
    AffineForm, X, ONE, ZERO, format_rational, integer_rank, interpolate_affine,
    is_integer_multiple, parse_rational, primitive_vector, rational_rank,
)

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=60)


@pytest.mark.parametrize("text,value", [("3/7", Fraction(3, 7)), (" -2/4 ", Fraction(-1, 2)), ("5", Fraction(5))])
def test_parse(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["1/0", "abc", "0.25", "1/", ""])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


@given(fractions)
def test_format_roundtrip(q):
    assert parse_rational(format_rational(q)) == q


@pytest.mark.parametrize("form,text", [
    (AffineForm(-1, 3), "-1+3x"), (AffineForm(1, -2), "1-2x"), (X, "x"),
    (ZERO, "0"), (ONE, "1"), (AffineForm(0, -1), "-x"), (AffineForm(Fraction(1, 2), Fraction(3, 2)), "1/2+3/2x"),
])
def test_affine_str(form, text):
    assert str(form) == text


@given(fractions, fractions, fractions, fractions, fractions)
def test_affine_arithmetic(a1, b1, a2, b2, x):
    f, g = AffineForm(a1, b1), AffineForm(a2, b2)
    assert (f + g)(x) == f(x) + g(x)
    assert (f - g)(x) == f(x) - g(x)
    assert (-f)(x) == -f(x)
    assert f.scale(a2)(x) == a2 * f(x)
    assert AffineForm.from_json(f.to_json()) == f


@given(fractions, fractions, fractions, fractions)
def test_interpolation_recovers_form(a, b, x1, dx):
    if dx == 0:
        return
    f = AffineForm(a, b)
    assert interpolate_affine(x1, f(x1), x1 + dx, f(x1 + dx)) == f


def test_interpolation_needs_distinct_points():
    with pytest.raises(ValueError):
        interpolate_affine(1, 2, 1, 3)


def test_integer_multiple():
    assert is_integer_multiple(Fraction(2, 6), 3)
    assert not is_integer_multiple(Fraction(2, 7), 6)


@given(st.lists(st.lists(st.integers(-6, 6), min_size=4, max_size=4), min_size=1, max_size=6))
def test_integer_rank_matches_numpy(rows):
    assert integer_rank(rows) == np.linalg.matrix_rank(np.array(rows, dtype=float))


def test_rational_rank():
    assert rational_rank([[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), 1]]) == 1


@given(st.lists(fractions, min_size=2, max_size=5).filter(any))
def test_primitive_vector(vec):
    p = primitive_vector(vec)
    assert np.gcd.reduce([abs(c) for c in p]) == 1
    ratio = {Fraction(v) / c for v, c in zip(vec, p) if c}
    assert len(ratio) == 1 and next(iter(ratio)) > 0
