from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd

from .rational import RationalLike, as_fraction, format_rational, is_integer_multiple


class IntervalType(enum.Enum):
    TypeI = "i"
    TypeII = "ii"


@dataclass(frozen=True)
class FareyInterval:
    lower: Fraction
    upper: Fraction
    order_n: int
    interval_type: IntervalType
    k_index: int

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def contains(self, x: RationalLike) -> bool:
        return self.lower < as_fraction(x) < self.upper

    def to_json(self) -> dict:
        return {
            "lower": format_rational(self.lower),
            "upper": format_rational(self.upper),
            "type": self.interval_type.value,
            "k": self.k_index,
        }


def farey_sequence(n: int) -> list[Fraction]:
    """Reduced fractions in [0, 1] with denominator at most n, increasing."""
    if n < 1:
        raise ValueError("n must be positive")
    # classical next-term recurrence
    a, b, c, d = 0, 1, 1, n
    out = [Fraction(0)]
    while c <= n:
        k = (n + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
        out.append(Fraction(a, b))
    return out


def farey_neighbours(kappa: int, n: int) -> tuple[Fraction, Fraction]:
    """Left and right neighbours of kappa/n in the Farey sequence of order n."""
    if not 1 <= kappa <= n - 1 or gcd(kappa, n) != 1:
        raise ValueError(f"need 1 <= kappa <= n-1 with gcd(kappa, n) = 1, got kappa={kappa}, n={n}")
    b = pow(kappa, -1, n) if n > 1 else 1
    a = (b * kappa - 1) // n
    d = n - b
    c = (1 + kappa * d) // n
    return Fraction(a, b), Fraction(c, d)


def excluded_multiple(x: RationalLike, n: int) -> int | None:
    """Smallest m in 1..n with m*x integral, or None."""
    x = as_fraction(x)
    return next((m for m in range(1, n + 1) if is_integer_multiple(x, m)), None)


def is_admissible(x: RationalLike, n: int) -> bool:
    x = as_fraction(x)
    if not 0 < x < 1:
        raise ValueError("x must lie strictly between 0 and 1")
    return excluded_multiple(x, n) is None


def k_index(x: RationalLike, n: int) -> int:
    return floor(n * as_fraction(x))


def classify_intervals(n: int, restrict_to_half: bool = True) -> list[FareyInterval]:
    if n < 3:
        raise ValueError("classification needs n >= 3")
    seq = farey_sequence(n)
    if restrict_to_half:
        seq = [f for f in seq if f <= Fraction(1, 2)]
    special = {Fraction(kappa, n) for kappa in range(1, n) if gcd(kappa, n) == 1}
    out = []
    for lo, hi in zip(seq, seq[1:]):
        kind = IntervalType.TypeI if (lo in special or hi in special) else IntervalType.TypeII
        out.append(FareyInterval(lo, hi, n, kind, k_index((lo + hi) / 2, n)))
    return out


def interval_counts_table(n_min: int, n_max: int, restrict_to_half: bool = True) -> list[tuple[int, int, int]]:
    if not 3 <= n_min <= n_max:
        raise ValueError("need 3 <= n_min <= n_max")
    rows = []
    for n in range(n_min, n_max + 1):
        ivs = classify_intervals(n, restrict_to_half)
        n1 = sum(iv.interval_type is IntervalType.TypeI for iv in ivs)
        rows.append((n, n1, len(ivs) - n1))
    return rows


def interval_of(x: RationalLike, n: int) -> FareyInterval:
    """The Farey interval of order n containing an admissible x."""
    x = as_fraction(x)
    if not is_admissible(x, n):
        raise ValueError(f"x={format_rational(x)} is an excluded value for n={n}")
    for iv in classify_intervals(n, restrict_to_half=False):
        if iv.contains(x):
            return iv
    raise AssertionError("unreachable: admissible x lies in some interval")
