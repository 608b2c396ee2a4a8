"""Fiber structure over a point of the polytope.

The fiber over xi is the quotient of the isotropy group of delta(xi) by the
stabilizer of u0, acting through (X, T) -> Theta0(X) T X^-1 with
Theta0(X) = A0^-1 X A0.  Everything here works in that unconjugated picture.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polytope import build_h_representation, contains, evaluate_point, prop56_vertex, rotations
from .rational import RationalLike, as_fraction
from .spectral import EigenBlock, UVector, delta_of, residue_constraints, solve_A0, solve_u

COMMUTE_TOL = 1e-9


class UnsupportedPattern(ValueError):
    pass


@dataclass(frozen=True)
class IsotropyStructure:
    blocks: tuple[EigenBlock, ...]

    @property
    def group_dim(self) -> int:
        return sum(b.multiplicity ** 2 for b in self.blocks) - 1

    @property
    def description(self) -> str:
        return "S(" + " x ".join(f"U({b.multiplicity})" for b in self.blocks) + ")"


@dataclass(frozen=True)
class BlockFactor:
    block: EigenBlock
    split: bool  # u0 has mass on the block

    @property
    def description(self) -> str:
        m = self.block.multiplicity
        if not self.split:
            return f"U({m})"
        return "U(1)" if m == 1 else f"U({m - 1})xU(1)"


@dataclass(frozen=True)
class StabilizerStructure:
    per_block: tuple[BlockFactor, ...]

    @property
    def group_dim(self) -> int:
        # split blocks share one U(1): u0 is a single eigenvector
        full = sum(f.block.multiplicity ** 2 for f in self.per_block if not f.split)
        split = [f for f in self.per_block if f.split]
        return full + sum((f.block.multiplicity - 1) ** 2 for f in split) + (1 if split else 0) - 1

    @property
    def description(self) -> str:
        return " x ".join(f.description for f in self.per_block)


@dataclass(frozen=True)
class FiberType:
    kind: str  # Torus, Point, Sphere3, Conjectural, Unrecognized
    dim: int | None = None
    detail: str = ""

    def __str__(self) -> str:
        if self.kind == "Torus":
            return f"Torus({self.dim})"
        if self.kind == "Conjectural":
            return f"Conjectural({self.detail})"
        if self.kind == "Unrecognized":
            return f"Unrecognized({self.detail})"
        return self.kind


@dataclass(frozen=True)
class FiberReport:
    xi: tuple
    isotropy: IsotropyStructure
    stabilizer: StabilizerStructure
    u0: UVector
    fiber_dim: int
    recognized_type: FiberType
    masses: tuple[float, ...] = field(default=())


def isotropy_of(xi: Sequence[RationalLike]) -> IsotropyStructure:
    return IsotropyStructure(delta_of(xi).blocks)


def stabilizer_of(xi: Sequence[RationalLike], u0: UVector) -> StabilizerStructure:
    u = u0.components
    return StabilizerStructure(tuple(
        BlockFactor(b, bool(np.any(np.abs(u[list(b.indices)]) > 1e-12)))
        for b in delta_of(xi).blocks))


def sphere3_pattern(blocks: Sequence[EigenBlock], u: np.ndarray) -> tuple[EigenBlock, int] | None:
    """Return (2-block, singleton index) when blocks are {2,1,...,1} and u0 lives on
    the 2-block plus exactly one singleton."""
    sizes = sorted(b.multiplicity for b in blocks)
    if sizes != [1] * (len(blocks) - 1) + [2]:
        return None
    pair = next(b for b in blocks if b.multiplicity == 2)
    support = set(np.flatnonzero(np.abs(u) > 1e-12))
    singles = support - set(pair.indices)
    if pair.last not in support or len(singles) != 1:
        return None
    return pair, singles.pop()


def _recognize(xi: tuple, x: Fraction, iso: IsotropyStructure, u0: UVector, masses) -> FiberType:
    n = len(xi)
    blocks = iso.blocks
    if all(b.multiplicity == 1 for b in blocks):
        d = sum(1 for _, m in masses if m <= 1e-12)
        if d == 0:
            return FiberType("Torus", n - 1)
        if d == n - 1:
            return FiberType("Point", 0)
        return FiberType("Torus", n - 1 - d)
    if sphere3_pattern(blocks, u0.components) is not None:
        return FiberType("Sphere3", 3)
    if n == 9 and tuple(xi) in rotations(evaluate_point(prop56_vertex(), x)):
        return FiberType("Conjectural", None, "SU(3)")
    data = "; ".join(f"{list(b.indices)}:{m:.6g}" for b, m in masses)
    return FiberType("Unrecognized", None, data)


def fiber_report(xi: Sequence[RationalLike], x: RationalLike) -> FiberReport:
    xi = tuple(map(as_fraction, xi))
    x = as_fraction(x)
    if contains(xi, build_h_representation(len(xi), x)).status == "outside":
        raise ValueError("xi is not in the polytope")
    masses = residue_constraints(xi, x, check_membership=False)
    u0 = solve_u(xi, x)
    iso = isotropy_of(xi)
    stab = stabilizer_of(xi, u0)
    kind = _recognize(xi, x, iso, u0, masses)
    return FiberReport(xi, iso, stab, u0, iso.group_dim - stab.group_dim, kind,
                       tuple(m for _, m in masses))


def _commutator(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a @ b - b @ a)))


def theta0(X: np.ndarray, A0: np.ndarray) -> np.ndarray:
    return A0.conj().T @ X @ A0


def twisted_action(X: np.ndarray, T: np.ndarray, A0: np.ndarray,
                   delta: np.ndarray | None = None, mu_delta: np.ndarray | None = None,
                   tol: float = COMMUTE_TOL) -> np.ndarray:
    """(X, T) -> Theta0(X) T X^-1."""
    if delta is not None:
        if _commutator(T, delta) > tol:
            raise ValueError("T does not commute with delta(xi)")
        if _commutator(X, delta) > tol:
            raise ValueError("X does not commute with delta(xi)")
    if mu_delta is not None and _commutator(X, mu_delta) > tol:
        raise ValueError("X does not commute with mu_hat(y, u0) delta(xi)")
    return theta0(X, A0) @ T @ X.conj().T


@dataclass(frozen=True)
class GaugeFix:
    Z: np.ndarray
    X: np.ndarray
    representative: np.ndarray


class SphereGauge:
    """Gauge data for a vertex of the {2,1,...,1} pattern with a two-point u0 support."""

    def __init__(self, xi: Sequence[RationalLike], x: RationalLike, A0: np.ndarray | None = None,
                 u0: UVector | None = None):
        self.xi = tuple(map(as_fraction, xi))
        self.x = as_fraction(x)
        self.n = len(self.xi)
        self.delta = delta_of(self.xi)
        self.u0 = u0 if u0 is not None else solve_u(self.xi, self.x)
        found = sphere3_pattern(self.delta.blocks, self.u0.components)
        if found is None:
            raise UnsupportedPattern("gauge fixing needs one 2-block and a two-point u0 support")
        self.pair, self.single = found
        self.A0 = A0 if A0 is not None else solve_A0(self.xi, self.x, self.u0)
        n = self.n
        # theta index whose phase Theta0(X) carries in each diagonal slot
        support = {self.pair.last, self.single}
        src = []
        for j in range(n):
            col = np.abs(self.A0[:, j])
            hot = set(np.flatnonzero(col > 1e-9))
            if len(hot) == 1:
                src.append(hot.pop())
            elif hot <= support:
                src.append(self.pair.last)
            else:
                raise UnsupportedPattern("conjugator column is not adapted to the stabilizer torus")
        self.source = src
        self.singletons = [b.indices[0] for b in self.delta.blocks if b.multiplicity == 1]
        rows = []
        tie = np.zeros(n)
        tie[self.pair.last], tie[self.single] = 1, -1
        rows.append(tie)
        rows.append(np.ones(n))
        for j in self.singletons:
            r = np.zeros(n)
            r[src[j]] += 1
            r[j] -= 1
            rows.append(r)
        self.system = np.array(rows)
        if np.linalg.matrix_rank(self.system) < n:
            raise UnsupportedPattern("gauge conditions are degenerate")

    def stabilizer_element(self, theta: np.ndarray) -> np.ndarray:
        return np.diag(np.exp(1j * np.asarray(theta)))

    def random_stabilizer(self, rng: np.random.Generator) -> np.ndarray:
        theta = rng.uniform(-np.pi, np.pi, self.n)
        theta[self.single] = theta[self.pair.last]
        theta -= theta.mean()  # det = 1; the tie survives a common shift
        return self.stabilizer_element(theta)

    def random_isotropy(self, rng: np.random.Generator) -> np.ndarray:
        n = self.n
        T = np.zeros((n, n), dtype=complex)
        G = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        Q, R = np.linalg.qr(G)
        Q = Q * (np.diag(R) / np.abs(np.diag(R)))
        i, j = self.pair.indices
        T[np.ix_([i, j], [i, j])] = Q
        for s in self.singletons:
            T[s, s] = np.exp(1j * rng.uniform(-np.pi, np.pi))
        T /= np.linalg.det(T) ** (1 / n)
        return T

    def embed(self, Z: np.ndarray) -> np.ndarray:
        T = np.eye(self.n, dtype=complex)
        i, j = self.pair.indices
        T[np.ix_([i, j], [i, j])] = Z
        return T

    def fix(self, T: np.ndarray, tol: float = 1e-8) -> GaugeFix:
        n = self.n
        if _commutator(T, self.delta.matrix) > tol:
            raise ValueError("T does not commute with delta(xi)")
        rhs = np.zeros(n)
        rhs[2:] = [-np.angle(T[j, j]) for j in self.singletons]
        theta = np.linalg.solve(self.system, rhs)
        X = self.stabilizer_element(theta)
        rep = twisted_action(X, T, self.A0)
        i, j = self.pair.indices
        Z = rep[np.ix_([i, j], [i, j])]
        expect = self.embed(Z)
        if np.max(np.abs(rep - expect)) > tol:
            raise RuntimeError("gauge-fixed representative is not of the form diag(Z, 1, ..., 1)")
        return GaugeFix(Z, X, rep)


def gauge_fix(T: np.ndarray, xi: Sequence[RationalLike], x: RationalLike,
              A0: np.ndarray | None = None, u0: UVector | None = None) -> GaugeFix:
    return SphereGauge(xi, x, A0, u0).fix(T)


@dataclass
class SuiteOutcome:
    passed: bool
    samples: int
    seed: int
    max_commutator: float = 0.0
    max_gauge_drift: float = 0.0
    min_displacement: float = np.inf
    failures: list[str] = field(default_factory=list)


def orbit_invariance_suite(xi: Sequence[RationalLike], x: RationalLike, samples: int = 100,
                           seed: int = 0, tol: float = 1e-9) -> SuiteOutcome:
    gauge = SphereGauge(xi, x)
    rng = np.random.default_rng(seed)
    out = SuiteOutcome(True, samples, seed)
    delta = gauge.delta.matrix
    for s in range(samples):
        T = gauge.random_isotropy(rng)
        X = gauge.random_stabilizer(rng)
        moved = twisted_action(X, T, gauge.A0)
        comm = _commutator(moved, delta)
        drift = float(np.max(np.abs(gauge.fix(moved).Z - gauge.fix(T).Z)))
        disp = float(np.max(np.abs(moved - T)))
        out.max_commutator = max(out.max_commutator, comm)
        out.max_gauge_drift = max(out.max_gauge_drift, drift)
        out.min_displacement = min(out.min_displacement, disp)
        if comm > tol:
            out.failures.append(f"sample {s}: twisted image leaves the isotropy group ({comm:.3g})")
        if drift > 1e-8:
            out.failures.append(f"sample {s}: gauge representative moved by {drift:.3g}")
        if disp <= tol:
            out.failures.append(f"sample {s}: non-central X fixed T")
    out.passed = not out.failures
    return out
