"""Exact rationals and degree-one forms a + b*x.

Polytope coordinates are kept in units of pi, so every quantity here is
an exact :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

RationalLike = Union[int, Fraction, str]


def as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; floats and zero denominators are rejected."""
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    if q == 0:
        raise ValueError(f"malformed rational {text!r}: zero denominator")
    return Fraction(p, q)


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True, order=True)
class AffineForm:
    """The value ``a + b*x`` of a coordinate along a parameter interval."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "b", as_fraction(self.b))

    def __call__(self, x: RationalLike) -> Fraction:
        return self.a + self.b * as_fraction(x)

    def __add__(self, other: AffineForm) -> AffineForm:
        return AffineForm(self.a + other.a, self.b + other.b)

    def __sub__(self, other: AffineForm) -> AffineForm:
        return AffineForm(self.a - other.a, self.b - other.b)

    def __neg__(self) -> AffineForm:
        return AffineForm(-self.a, -self.b)

    def scale(self, c: RationalLike) -> AffineForm:
        c = as_fraction(c)
        return AffineForm(c * self.a, c * self.b)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def to_json(self) -> dict:
        return {"a": format_rational(self.a), "b": format_rational(self.b)}

    @classmethod
    def from_json(cls, obj: dict) -> AffineForm:
        return cls(parse_rational(obj["a"]), parse_rational(obj["b"]))

    def __str__(self) -> str:
        parts = []
        if self.a:
            parts.append(format_rational(self.a))
        if self.b:
            coef = "" if abs(self.b) == 1 else format_rational(abs(self.b))
            sign = "-" if self.b < 0 else "+"
            if parts:
                parts.append(f"{sign}{coef}x")
            else:
                parts.append(f"{'-' if self.b < 0 else ''}{coef}x")
        return "".join(parts) or "0"


X = AffineForm(0, 1)
ONE = AffineForm(1, 0)
ZERO = AffineForm(0, 0)


def evaluate(form: AffineForm, x: RationalLike) -> Fraction:
    return form(x)


def interpolate_affine(x1: RationalLike, v1: RationalLike,
                       x2: RationalLike, v2: RationalLike) -> AffineForm:
    """Unique affine form through ``(x1, v1)`` and ``(x2, v2)``."""
    x1, v1, x2, v2 = map(as_fraction, (x1, v1, x2, v2))
    if x1 == x2:
        raise ValueError("interpolation needs two distinct abscissae")
    b = (v2 - v1) / (x2 - x1)
    return AffineForm(v1 - b * x1, b)


def is_integer_multiple(x: RationalLike, m: int) -> bool:
    """True iff ``m*x`` is an integer, i.e. exp(2 m i y) = 1 for y = x*pi."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    return (m * as_fraction(x)).denominator == 1


def integer_rank(rows: Iterable[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    mat = [list(r) for r in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(mat)) if mat[i][col]), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        p = mat[rank]
        for i in range(rank + 1, len(mat)):
            f = mat[i][col]
            if f:
                row = mat[i]
                new = [p[col] * row[j] - f * p[j] for j in range(ncols)]
                g = 0
                for v in new:
                    g = gcd(g, v)
                mat[i] = [v // g for v in new] if g > 1 else new
        rank += 1
        if rank == len(mat):
            break
    return rank


def rational_rank(rows: Iterable[Sequence[Fraction]]) -> int:
    rows = [list(map(as_fraction, r)) for r in rows]
    scaled = []
    for r in rows:
        den = 1
        for v in r:
            den = den * v.denominator // gcd(den, v.denominator)
        scaled.append([int(v * den) for v in r])
    return integer_rank(scaled)


def primitive_vector(vec: Sequence[RationalLike]) -> tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    fr = [as_fraction(v) for v in vec]
    den = 1
    for v in fr:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in fr]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(v // g for v in ints)
