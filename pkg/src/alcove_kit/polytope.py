"""The polytope A_y inside the alcove, in exact arithmetic.

Points are length-n tuples of Fractions in units of pi summing to 1.
For k = floor(n*x) the polytope is cut out by the 2n cyclic-sum
inequalities

    xi_l + ... + xi_{l+k-1} <= x        (index l-1, "le")
    xi_l + ... + xi_{l+k}   >= x        (index n+l-1, "ge")

for l = 1..n. When k = 0 the "le" rows are empty sums and never bind.
"""

from __future__ import annotations

import enum
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

from .farey import FareyInterval, excluded_multiple, k_index
from .rational import (
    AffineForm,
    RationalLike,
    X,
    ZERO,
    as_fraction,
    format_rational,
    integer_rank,
    interpolate_affine,
    primitive_vector,
)

log = logging.getLogger(__name__)

Point = tuple  # tuple[Fraction, ...] or tuple[AffineForm, ...]


class InadmissibleParameter(ValueError):
    pass


class StructuralInstability(RuntimeError):
    pass


@dataclass(frozen=True)
class Inequality:
    index: int
    sense: str  # "le" or "ge"
    ell: int  # 1-based starting index of the cyclic window
    support: tuple[int, ...]  # 0-based coordinates in the window
    bound: AffineForm = X

    @property
    def vacuous(self) -> bool:
        return not self.support

    def lhs(self, point: Sequence) -> Fraction:
        return sum((point[j] for j in self.support), Fraction(0))

    def slack(self, point: Sequence, x: Fraction) -> Fraction:
        """Nonnegative exactly when the inequality holds."""
        s = self.lhs(point)
        return x - s if self.sense == "le" else s - x

    def describe(self) -> str:
        terms = "+".join(f"xi{j + 1}" for j in self.support) or "0"
        return f"{terms} {'<=' if self.sense == 'le' else '>='} x"


def cyclic_window(start: int, length: int, n: int) -> tuple[int, ...]:
    return tuple((start + i) % n for i in range(length))


def sigma(point: Sequence) -> tuple:
    """Cyclic shift (sigma xi)_j = xi_{j+1}."""
    return tuple(point[1:]) + (point[0],)


def rotations(point: Sequence) -> list[tuple]:
    p = tuple(point)
    return [p[i:] + p[:i] for i in range(len(p))]


def make_inequalities(n: int, k: int) -> tuple[Inequality, ...]:
    le = [Inequality(l, "le", l + 1, cyclic_window(l, k, n)) for l in range(n)]
    ge = [Inequality(n + l, "ge", l + 1, cyclic_window(l, k + 1, n)) for l in range(n)]
    return tuple(le + ge)


def _check_admissible(n: int, x: Fraction) -> None:
    if not 0 < x < 1:
        raise InadmissibleParameter(f"x={format_rational(x)} must lie in (0, 1)")
    m = excluded_multiple(x, n)
    if m is not None:
        raise InadmissibleParameter(
            f"x={format_rational(x)} is excluded for n={n}: {m}*x is an integer")


# --------------------------------------------------------------------------
# vertex enumeration


def _double_description(n: int, k: int, x: Fraction):
    """Incremental double description over integer-scaled points.

    A point is stored as (V, D) with V integral and xi = V/D.  Tight sets
    are bitmasks: bits 0..n-1 for xi_j >= 0, then one bit per added row.
    """
    p, q = x.numerator, x.denominator
    rows = []
    for l in range(n):
        if k:
            rows.append((1, cyclic_window(l, k, n)))
        rows.append((-1, cyclic_window(l, k + 1, n)))

    verts = [(tuple(int(i == j) for j in range(n)), 1, ((1 << n) - 1) ^ (1 << i)) for i in range(n)]
    need = n - 2  # an edge of an (n-1)-polytope lies on >= n-2 independent facets
    for h, (sense, window) in enumerate(rows):
        bit = 1 << (n + h)
        slacks = []
        for V, D, _ in verts:
            s = sum(V[j] for j in window)
            slacks.append(p * D - q * s if sense == 1 else q * s - p * D)
        plus = [i for i, s in enumerate(slacks) if s > 0]
        minus = [i for i, s in enumerate(slacks) if s < 0]
        if not minus:
            verts = [(V, D, m | bit) if slacks[i] == 0 else (V, D, m) for i, (V, D, m) in enumerate(verts)]
            continue
        masks = np.array([m for _, _, m in verts], dtype=np.uint64)
        new = []
        minus_masks = masks[minus]
        for i in plus:
            Vp, Dp, mp = verts[i]
            sp = slacks[i]
            common = np.bitwise_and(minus_masks, np.uint64(mp))
            for idx in np.flatnonzero(np.bitwise_count(common) >= need):
                T = common[idx]
                if np.count_nonzero(np.bitwise_and(masks, T) == T) != 2:
                    continue
                j = minus[idx]
                Vm, Dm, _ = verts[j]
                sm = slacks[j]
                W = [sp * a - sm * b for a, b in zip(Vm, Vp)]
                DW = sp * Dm - sm * Dp
                g = DW
                for w in W:
                    g = gcd(g, w)
                new.append((tuple(w // g for w in W), DW // g, int(T) | bit))
        verts = ([verts[i] for i in plus]
                 + [(V, D, m | bit) for (V, D, m), s in zip(verts, slacks) if s == 0]
                 + new)
    return [tuple(Fraction(v, D) for v in V) for V, D, _ in verts]


def _subset_scan(ineqs: Sequence[Inequality], n: int, x: Fraction) -> list[tuple]:
    """Reference enumeration: solve every (n-1)-subset of hyperplanes."""
    live = [c for c in ineqs if not c.vacuous]
    found = set()
    for combo in itertools.combinations(live, n - 1):
        A = [[Fraction(1)] * n]
        b = [Fraction(1)]
        for c in combo:
            A.append([Fraction(int(j in c.support)) for j in range(n)])
            b.append(x)
        sol = solve_exact(A, b)
        if sol is None:
            continue
        if all(c.slack(sol, x) >= 0 for c in live) and min(sol) >= 0:
            found.add(sol)
    return sorted(found)


def solve_exact(A: list[list[Fraction]], b: list[Fraction]) -> tuple | None:
    """Unique solution of a square rational system, or None if singular."""
    n = len(A)
    M = [row[:] + [rhs] for row, rhs in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [v / pv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return tuple(M[r][n] for r in range(n))


# --------------------------------------------------------------------------
# model


@dataclass(frozen=True)
class Membership:
    status: str  # "inside", "boundary" or "outside"
    active: tuple[int, ...] = ()
    violated: tuple[int, ...] = ()


@dataclass(frozen=True)
class Face:
    dim: int
    vertices: frozenset[int]
    active: frozenset[int]


@dataclass(frozen=True)
class FaceLattice:
    faces: tuple[tuple[Face, ...], ...]  # indexed by dimension 0..n-2
    facet_inequalities: tuple[frozenset[int], ...]  # inequality indices per facet

    @property
    def face_vector(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.faces)


@dataclass(frozen=True)
class VertexClass:
    representative: tuple
    orbit_size: int
    is_singular: bool
    active_equalities: frozenset[int]
    members: tuple[int, ...] = ()


@dataclass(frozen=True)
class PolytopeModel:
    n: int
    x: Fraction
    k: int
    inequalities: tuple[Inequality, ...]
    engine: str = "dd"

    @cached_property
    def vertices(self) -> tuple[tuple[Fraction, ...], ...]:
        if self.engine == "dd":
            pts = _double_description(self.n, self.k, self.x)
        elif self.engine == "scan":
            pts = _subset_scan(self.inequalities, self.n, self.x)
        else:
            raise ValueError(f"unknown engine {self.engine!r}")
        return tuple(sorted(set(pts)))

    @cached_property
    def tight_masks(self) -> tuple[int, ...]:
        return tuple(self.tight_mask(v) for v in self.vertices)

    def tight_mask(self, point: Sequence) -> int:
        m = 0
        for c in self.inequalities:
            if not c.vacuous and c.slack(point, self.x) == 0:
                m |= 1 << c.index
        return m

    def active_set(self, point: Sequence) -> frozenset[int]:
        return frozenset(bits(self.tight_mask(point)))

    def index_of(self, point: Sequence) -> int:
        try:
            return self.vertices.index(tuple(map(as_fraction, point)))
        except ValueError:
            raise ValueError(f"{format_point(point)} is not a vertex of the polytope") from None

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        masks = self.tight_masks
        arr = np.array(masks, dtype=np.uint64)
        need = self.n - 2
        out = []
        for i, j in itertools.combinations(range(len(masks)), 2):
            T = masks[i] & masks[j]
            if T.bit_count() < need:
                continue
            if np.count_nonzero(np.bitwise_and(arr, np.uint64(T)) == np.uint64(T)) == 2:
                out.append((i, j))
        return tuple(out)

    def neighbours(self, i: int) -> list[int]:
        return sorted({b if a == i else a for a, b in self.edges if i in (a, b)})

    @cached_property
    def lattice(self) -> FaceLattice:
        return face_lattice(self)

    @property
    def face_vector(self) -> tuple[int, ...]:
        return self.lattice.face_vector

    @cached_property
    def classes(self) -> tuple[VertexClass, ...]:
        return tuple(cyclic_orbits(self.vertices, model=self))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "x": format_rational(self.x),
            "k": self.k,
            "face_vector": list(self.face_vector),
            "vertices": [[format_rational(c) for c in v] for v in self.vertices],
            "classes": [
                {"rep": [format_rational(c) for c in cl.representative],
                 "orbit": cl.orbit_size, "singular": cl.is_singular}
                for cl in self.classes
            ],
            "facets": [sorted(f) for f in self.lattice.facet_inequalities],
        }


def bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def format_point(point: Sequence) -> str:
    return "(" + ", ".join(str(c) if isinstance(c, AffineForm) else format_rational(c) for c in point) + ")"


def build_h_representation(n: int, x: RationalLike, engine: str = "dd") -> PolytopeModel:
    x = as_fraction(x)
    if n < 2:
        raise ValueError("n must be at least 2")
    _check_admissible(n, x)
    k = k_index(x, n)
    return PolytopeModel(n, x, k, make_inequalities(n, k), engine)


def enumerate_vertices(model: PolytopeModel) -> tuple[tuple[Fraction, ...], ...]:
    return model.vertices


def _scaled_rows(points: Iterable[Sequence[Fraction]]) -> list[list[int]]:
    pts = list(points)
    den = 1
    for p in pts:
        for c in p:
            den = lcm(den, c.denominator)
    return [[int(c * den) for c in p] for p in pts]


def face_lattice(model: PolytopeModel) -> FaceLattice:
    n = model.n
    verts = model.vertices
    rows = _scaled_rows(verts)
    masks = model.tight_masks

    def vset(fmask: int) -> list[int]:
        return bits(fmask)

    def dim_of(vmask: int) -> int:
        # points lie on sum = 1, so affine dimension is linear rank minus one
        return integer_rank(rows[i] for i in bits(vmask)) - 1

    by_facet: dict[int, set[int]] = {}
    for c in model.inequalities:
        if c.vacuous:
            continue
        vm = 0
        for i, m in enumerate(masks):
            if m >> c.index & 1:
                vm |= 1 << i
        if vm and dim_of(vm) == n - 2:
            by_facet.setdefault(vm, set()).add(c.index)
    facets = sorted(by_facet)

    seen = set(facets)
    frontier = list(facets)
    while frontier:
        nxt = []
        for F in frontier:
            for G in facets:
                H = F & G
                if H and H not in seen:
                    seen.add(H)
                    nxt.append(H)
        frontier = nxt

    faces: list[list[Face]] = [[] for _ in range(n - 1)]
    for vm in sorted(seen):
        d = 0 if vm.bit_count() == 1 else dim_of(vm)
        members = frozenset(vset(vm))
        active = masks[next(iter(members))]
        for i in members:
            active &= masks[i]
        faces[d].append(Face(d, members, frozenset(bits(active))))
    return FaceLattice(tuple(tuple(f) for f in faces),
                       tuple(frozenset(by_facet[f]) for f in facets))


# --------------------------------------------------------------------------
# cyclic symmetry


def _sort_key(point: Sequence, at: Fraction | None):
    if point and isinstance(point[0], AffineForm):
        return (tuple(c(at) for c in point), tuple((c.a, c.b) for c in point))
    return (tuple(point),)


def canonical_rotation(point: Sequence, at: Fraction | None = None) -> tuple:
    """Lexicographically least cyclic rotation (affine points ordered by value at ``at``)."""
    return min(rotations(point), key=lambda p: _sort_key(p, at))


def _is_zero(c) -> bool:
    return c.is_zero() if isinstance(c, AffineForm) else c == 0


def cyclic_orbits(vertices: Sequence[Sequence], model: PolytopeModel | None = None,
                  at: Fraction | None = None, masks: Sequence[int] | None = None) -> list[VertexClass]:
    pts = [tuple(v) for v in vertices]
    index = {p: i for i, p in enumerate(pts)}
    done = set()
    out = []
    for p in pts:
        if p in done:
            continue
        orbit = []
        for r in rotations(p):
            if r not in index:
                raise ValueError(f"vertex set is not closed under the cyclic shift: {format_point(r)} missing")
            if r not in orbit:
                orbit.append(r)
        done.update(orbit)
        rep = canonical_rotation(p, at)
        if masks is not None:
            active = frozenset(bits(masks[index[rep]]))
        elif model is not None:
            active = model.active_set(rep)
        else:
            active = frozenset()
        out.append(VertexClass(rep, len(orbit), any(_is_zero(c) for c in rep), active,
                               tuple(sorted(index[r] for r in orbit))))
    out.sort(key=lambda c: _sort_key(c.representative, at))
    return out


# --------------------------------------------------------------------------
# symbolic vertices over a Farey interval


@dataclass(frozen=True)
class SymbolicPolytope:
    n: int
    interval: FareyInterval
    vertices: tuple[tuple[AffineForm, ...], ...]
    masks: tuple[int, ...]
    samples: tuple[Fraction, Fraction, Fraction]

    @cached_property
    def classes(self) -> tuple[VertexClass, ...]:
        return tuple(cyclic_orbits(self.vertices, at=self.interval.midpoint, masks=self.masks))

    def at(self, x: RationalLike) -> set[tuple[Fraction, ...]]:
        return {tuple(c(x) for c in v) for v in self.vertices}


def symbolic_vertices(n: int, interval: FareyInterval) -> SymbolicPolytope:
    lo, hi = interval.lower, interval.upper
    x1, x2, x3 = lo + (hi - lo) / 3, lo + 2 * (hi - lo) / 3, (lo + hi) / 2
    m1, m2 = build_h_representation(n, x1), build_h_representation(n, x2)
    if len(m1.vertices) != len(m2.vertices):
        raise StructuralInstability(
            f"vertex counts differ: {len(m1.vertices)} at x={format_rational(x1)}, "
            f"{len(m2.vertices)} at x={format_rational(x2)}")
    second = {}
    for v, m in zip(m2.vertices, m2.tight_masks):
        if m in second:
            raise StructuralInstability(f"two vertices share an active set at x={format_rational(x2)}")
        second[m] = v
    forms, masks = [], []
    for v, m in zip(m1.vertices, m1.tight_masks):
        w = second.get(m)
        if w is None:
            raise StructuralInstability(
                f"active set of {format_point(v)} at x={format_rational(x1)} has no partner "
                f"at x={format_rational(x2)}")
        forms.append(tuple(interpolate_affine(x1, a, x2, b) for a, b in zip(v, w)))
        masks.append(m)

    m3 = build_h_representation(n, x3)
    predicted = {tuple(c(x3) for c in f): m for f, m in zip(forms, masks)}
    actual = dict(zip(m3.vertices, m3.tight_masks))
    if predicted != actual:
        raise StructuralInstability(
            f"interpolated vertices fail validation at x={format_rational(x3)}")
    order = sorted(range(len(forms)), key=lambda i: _sort_key(forms[i], x3))
    return SymbolicPolytope(n, interval, tuple(forms[i] for i in order),
                            tuple(masks[i] for i in order), (x1, x2, x3))


# --------------------------------------------------------------------------
# membership and edges


def contains(point: Sequence[RationalLike], model: PolytopeModel) -> Membership:
    pt = tuple(map(as_fraction, point))
    if len(pt) != model.n:
        raise ValueError(f"expected {model.n} coordinates, got {len(pt)}")
    if sum(pt) != 1:
        raise ValueError("coordinates must sum to 1 (units of pi)")
    active, violated = [], []
    for c in model.inequalities:
        if c.vacuous:
            continue
        s = c.slack(pt, model.x)
        if s < 0:
            violated.append(c.index)
        elif s == 0:
            active.append(c.index)
    if min(pt) < 0:
        violated.append(-1)
    if violated:
        return Membership("outside", tuple(active), tuple(violated))
    if active:
        return Membership("boundary", tuple(active))
    return Membership("inside")


def edge_directions_at(vertex: Sequence[RationalLike], model: PolytopeModel) -> list[tuple[Fraction, ...]]:
    """Differences ``w - v`` to every neighbouring vertex ``w``."""
    v = tuple(map(as_fraction, vertex))
    if contains(v, model).status == "outside":
        raise ValueError(f"{format_point(v)} is outside the polytope")
    i = model.index_of(v)
    return [tuple(a - b for a, b in zip(model.vertices[j], v)) for j in model.neighbours(i)]


def chart_n4(direction: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Linear part of (xi1, xi1 + 2 xi2 + xi3 - 1, xi3 - (1 - 2x))."""
    d1, d2, d3, _ = direction
    return (d1, d1 + 2 * d2 + d3, d3)


def positive_multiple(u: Sequence[Fraction], v: Sequence[int]) -> bool:
    """True iff u = c v for some rational c > 0."""
    pairs = [(a, b) for a, b in zip(u, v)]
    ratio = None
    for a, b in pairs:
        if b == 0:
            if a != 0:
                return False
            continue
        r = Fraction(a) / b
        if ratio is None:
            ratio = r
        elif r != ratio:
            return False
    return ratio is not None and ratio > 0


# --------------------------------------------------------------------------
# explicit vertices


def vertex_R(n: int) -> tuple[AffineForm, ...]:
    coords = [X] * n
    coords[0] = AffineForm(-1, n - 1)
    coords[1] = coords[-1] = AffineForm(1, -(n - 2))
    return tuple(coords)


def vertex_I(n: int, s: int) -> tuple[AffineForm, ...]:
    if not 1 <= s <= n - 3:
        raise ValueError("s must lie in 1..n-3")
    coords = [X] * n
    coords[0] = ZERO
    coords[1 + s] = AffineForm(1, -(n - 2))
    return tuple(coords)


def prop56_vertex() -> tuple[AffineForm, ...]:
    """The n = 9 vertex with two consecutive zero coordinates."""
    z, one3 = ZERO, AffineForm(1, -3)
    return (z, z, X, z, one3, AffineForm(-1, 4), one3, z, X)


def evaluate_point(point: Sequence[AffineForm], x: RationalLike) -> tuple[Fraction, ...]:
    return tuple(c(x) for c in point)


@dataclass
class Theorem51Report:
    n: int
    x: Fraction
    vertex_count: int
    facet_count: int
    singular_count: int
    R_present: bool
    I_present: dict[int, bool]
    le_facet_incidence: int
    ge_facet_incidence: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_theorem_5_1(n: int, x: RationalLike, model: PolytopeModel | None = None) -> Theorem51Report:
    x = as_fraction(x)
    if n < 4 or not Fraction(1, n - 1) < x < Fraction(1, n - 2):
        raise ValueError(f"x must lie in (1/{n - 1}, 1/{n - 2})")
    model = model or build_h_representation(n, x)
    verts = set(model.vertices)
    lat = model.lattice
    facet_count = len(lat.facet_inequalities)
    singular = sum(1 for v in verts if min(v) == 0)
    R = evaluate_point(vertex_R(n), x)
    Is = {s: evaluate_point(vertex_I(n, s), x) in verts for s in range(1, n - 2)}
    le1 = sum(1 for m in model.tight_masks if m & 1)
    ge1 = sum(1 for m in model.tight_masks if m >> n & 1)

    rep = Theorem51Report(n, x, len(verts), facet_count, singular, R in verts, Is, le1, ge1)
    expect = [
        ("vertex count", len(verts), n * (n - 2)),
        ("facet count", facet_count, 2 * n),
        ("singular vertex count", singular, n * (n - 3)),
        ("vertices on xi1 = x", le1, (n - 3) * (n - 1)),
        ("vertices on xi1 + xi2 = x", ge1, 2 * (n - 2)),
    ]
    for name, got, want in expect:
        if got != want:
            rep.failures.append(f"{name}: expected {want}, got {got}")
    if not rep.R_present:
        rep.failures.append(f"R = {format_point(R)} not among vertices")
    for s, ok in Is.items():
        if not ok:
            rep.failures.append(f"I_{s} = {format_point(evaluate_point(vertex_I(n, s), x))} not among vertices")
    return rep


# --------------------------------------------------------------------------
# batch helpers


def _class_count(args) -> tuple[int, Fraction, Fraction, int]:
    n, lo, hi = args
    x = (lo + hi) / 2
    return n, lo, hi, len(build_h_representation(n, x).classes)


def class_counts(n: int, intervals: Sequence[FareyInterval], workers: int | None = None) -> list[int]:
    """Number of cyclic vertex classes at the midpoint of each interval."""
    jobs = [(n, iv.lower, iv.upper) for iv in intervals]
    if workers == 1 or len(jobs) < 2:
        results = list(map(_class_count, jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_class_count, jobs))
    return [r[3] for r in results]
