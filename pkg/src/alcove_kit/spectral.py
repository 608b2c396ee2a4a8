"""Diagonal representatives, the rank-one twist of mu_0, and residue data.

Angles are handled in units of pi on the exact side (``xi``, ``x``) and in
radians only when a float is formed.  Indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .rational import RationalLike, as_fraction

TWO_PI = 2 * np.pi
CLUSTER_TOL = 1e-8


class NotInPolytope(ValueError):
    """Raised when residue data shows that xi is not in A_y."""


class SpectralError(RuntimeError):
    pass


@dataclass(frozen=True)
class EigenBlock:
    value: complex
    indices: tuple[int, ...]  # cyclic run order

    @property
    def multiplicity(self) -> int:
        return len(self.indices)

    @property
    def last(self) -> int:
        return self.indices[-1]


@dataclass(frozen=True)
class DeltaMatrix:
    xi: tuple
    diagonal: np.ndarray
    blocks: tuple[EigenBlock, ...]

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal)

    @property
    def is_regular(self) -> bool:
        return len(self.blocks) == len(self.diagonal)


@dataclass(frozen=True)
class UVector:
    components: np.ndarray
    zero_pattern: tuple[bool, ...]


def _is_exact(xi: Sequence) -> bool:
    return all(isinstance(c, (Fraction, int)) for c in xi)


def phases(xi: Sequence) -> list:
    """Phase of delta_j in turns: sum_m (m+1) xi_m / n + sum_{m<j} xi_m.

    Exact when ``xi`` is rational.
    """
    n = len(xi)
    first = sum((m + 1) * c for m, c in enumerate(xi)) / n
    out = [first]
    for c in xi[:-1]:
        out.append(out[-1] + c)
    return out


def _turns(value) -> complex:
    return complex(np.exp(1j * TWO_PI * float(value % 1 if isinstance(value, Fraction) else value)))


def block_runs(xi: Sequence, tol: float = CLUSTER_TOL) -> list[tuple[int, ...]]:
    """Maximal cyclic runs of equal eigenvalues: j and j+1 merge when xi_j = 0."""
    n = len(xi)
    if _is_exact(xi):
        joined = [c == 0 for c in xi]
    else:
        # |delta_{j+1} - delta_j| = 2 |sin(pi xi_j)|
        joined = [abs(2 * np.sin(np.pi * float(c))) < tol for c in xi]
    if all(joined):
        raise ValueError("coordinates cannot all vanish")
    starts = [j for j in range(n) if not joined[j - 1]]
    runs = []
    for s in starts:
        run = [s]
        while joined[run[-1]]:
            run.append((run[-1] + 1) % n)
        runs.append(tuple(run))
    return runs


def delta_of(xi: Sequence[RationalLike | float], tol: float = CLUSTER_TOL) -> DeltaMatrix:
    xi = tuple(as_fraction(c) if isinstance(c, (int, str)) else c for c in xi)
    ph = phases(xi)
    diag = np.array([_turns(p) for p in ph])
    blocks = tuple(EigenBlock(diag[r[0]], r) for r in block_runs(xi, tol))
    return DeltaMatrix(xi, diag, blocks)


def xi_of(g: np.ndarray, tol: float = 1e-10) -> tuple[float, ...]:
    """The alcove point of a special unitary matrix, read off its spectrum."""
    g = np.asarray(g, dtype=complex)
    n = g.shape[0]
    det = np.linalg.det(g)
    if abs(det - 1) > max(tol, 1e-9) * n:
        raise SpectralError(f"determinant {det:.3g} is not 1")
    t = np.sort(np.mod(np.angle(np.linalg.eigvals(g)) / TWO_PI, 1.0))
    scores = []
    for r in range(n):
        seq = np.concatenate([t[r:], t[:r] + 1.0])
        xi = np.diff(np.append(seq, seq[0] + 1.0))
        predicted = np.dot(np.arange(1, n + 1), xi) / n
        miss = abs((predicted - seq[0] + 0.5) % 1.0 - 0.5)
        scores.append((miss, r, xi))
    scores.sort(key=lambda s: s[0])
    best, second = scores[0], scores[1] if n > 1 else None
    if best[0] > 1e-6:
        raise SpectralError(f"no cyclic rotation reproduces the spectrum (best mismatch {best[0]:.3g})")
    if second is not None and second[0] < 1e-6 and not np.allclose(second[2], best[2], atol=1e-8):
        raise SpectralError("ambiguous alcove point: two rotations match within tolerance")
    return tuple(float(v) for v in best[2])


def mu_zero(n: int, y: float) -> np.ndarray:
    d = np.full(n, np.exp(2j * y))
    d[-1] = np.exp(-2j * (n - 1) * y)
    return np.diag(d)


def mu_hat(y: float, u: Sequence[complex], tol: float = 1e-10) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if abs(np.vdot(u, u).real - 1) > tol:
        raise ValueError("u must be a unit vector")
    n = len(u)
    Y = np.exp(2j * y)
    return Y * np.eye(n) + (np.exp(-2j * (n - 1) * y) - Y) * np.outer(u, u.conj())


def _radians(x: RationalLike | float) -> float:
    return float(x) * np.pi


def f_s(n: int, s: int, y: float) -> float:
    """sin((s+1)y) sin((n-1)y) / (sin(sy) sin(ny))."""
    if not 1 <= s <= n - 3:
        raise ValueError("need 1 <= s <= n-3")
    if not np.pi / (n - 1) < y < np.pi / (n - 2):
        raise ValueError("y must lie in (pi/(n-1), pi/(n-2))")
    return float(np.sin((s + 1) * y) * np.sin((n - 1) * y) / (np.sin(s * y) * np.sin(n * y)))


def z_product(diagonal: np.ndarray, y: float) -> np.ndarray:
    """z_l = (sin y / sin ny) prod_{j != l} (e^{iy} d_l - e^{-iy} d_j) / (d_l - d_j)."""
    d = np.asarray(diagonal)
    n = len(d)
    pref = np.sin(y) / np.sin(n * y)
    out = np.empty(n, dtype=complex)
    for l in range(n):
        others = np.delete(d, l)
        out[l] = pref * np.prod((np.exp(1j * y) * d[l] - np.exp(-1j * y) * others) / (d[l] - others))
    return out


def z_sine(xi_radians: Sequence[float], y: float) -> np.ndarray:
    """The same z_l written through partial cyclic sums S of xi."""
    xi = np.asarray(xi_radians, dtype=float)
    n = len(xi)
    pref = np.sin(y) / np.sin(n * y)
    out = np.empty(n)
    for l in range(n):
        S = np.cumsum(np.roll(xi, -l))[:-1]
        out[l] = pref * np.prod(np.sin(S - y) / np.sin(S))
    return out


def z_forms(xi: Sequence, y: float) -> tuple[np.ndarray, np.ndarray]:
    delta = delta_of(xi)
    if not delta.is_regular:
        raise SpectralError("xi is not regular; use residue_constraints for block masses")
    return z_product(delta.diagonal, y), z_sine([float(c) * np.pi for c in xi], y)


def z_functions(xi: Sequence, x: RationalLike | float, tol: float = 1e-10) -> np.ndarray:
    zp, zs = z_forms(xi, _radians(x))
    if np.max(np.abs(zp - zs)) > tol * max(1.0, np.max(np.abs(zs))):
        raise SpectralError("the two expressions for z disagree beyond tolerance")
    return zs


def _coincident(a, b, tol: float) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return (a - b) % 1 == 0
    d = (float(a) - float(b)) % 1.0
    return min(d, 1.0 - d) < tol


def residue_constraints(xi: Sequence, x: RationalLike, tol: float = 1e-10,
                        check_membership: bool = True) -> list[tuple[EigenBlock, float]]:
    """Block masses sum_{j in M_k} |u_j|^2 forced by equal characteristic polynomials."""
    x = as_fraction(x) if not isinstance(x, float) else x
    n = len(xi)
    if check_membership and _is_exact(xi):
        from .polytope import build_h_representation, contains

        if contains(xi, build_h_representation(n, x)).status == "outside":
            raise NotInPolytope("xi violates the defining inequalities")
    delta = delta_of(xi)
    ph = phases(delta.xi)
    blocks = delta.blocks
    Y = _turns(x)
    c = _turns((1 - n) * x) - Y
    vals = [b.value for b in blocks]
    mults = [b.multiplicity for b in blocks]
    starts = [ph[b.indices[0]] for b in blocks]
    masses = []
    for k, blk in enumerate(blocks):
        zeta = Y * vals[k]
        hit = next((j for j in range(len(blocks)) if _coincident(starts[j], starts[k] + x, 1e-9)), None)
        order = mults[k] - (mults[hit] if hit is not None else 0)
        if order <= 0:
            masses.append((blk, 0.0))
            continue
        if order > 1:
            raise NotInPolytope(f"pole of order {order} at block {blk.indices}: xi is not in A_y")
        P = np.prod([(vals[j] - zeta) ** mults[j] for j in range(len(blocks)) if j != hit])
        Q = np.prod([(Y * vals[j] - zeta) ** mults[j] for j in range(len(blocks)) if j != k])
        w = P / (Q * c * vals[k])
        if abs(w.imag) > 1e-8 * max(1.0, abs(w)):
            raise SpectralError(f"complex block mass {w} for block {blk.indices}")
        if w.real < -max(tol, 1e-9):
            raise NotInPolytope(f"negative block mass {w.real:.3g} for block {blk.indices}")
        masses.append((blk, max(w.real, 0.0)))
    total = sum(m for _, m in masses)
    if abs(total - 1) > 1e-8:
        raise SpectralError(f"block masses sum to {total}, not 1")
    return masses


def characteristic_residual(diagonal: np.ndarray, u: np.ndarray, y: float, samples: int | None = None) -> float:
    """Max deviation of the identity between det(delta - zeta) and det(mu_hat delta - zeta)."""
    d = np.asarray(diagonal)
    n = len(d)
    Y = np.exp(2j * y)
    c = np.exp(2j * (1 - n) * y) - Y
    w = np.abs(u) ** 2
    m = samples or 2 * n
    worst = 0.0
    for zeta in np.exp(1j * TWO_PI * (np.arange(m) + 0.25) / m):
        lhs = np.prod(d - zeta)
        rhs = np.prod(Y * d - zeta)
        for k in range(n):
            rhs += c * w[k] * d[k] * np.prod(np.delete(Y * d - zeta, k))
        worst = max(worst, abs(lhs - rhs))
    return worst


def solve_u(xi: Sequence, x: RationalLike, tol: float = 1e-9) -> UVector:
    n = len(xi)
    masses = residue_constraints(xi, x)
    u = np.zeros(n, dtype=complex)
    for blk, m in masses:
        u[blk.last] = np.sqrt(m)
    u /= np.linalg.norm(u)
    res = characteristic_residual(delta_of(xi).diagonal, u, _radians(x))
    if res > tol:
        raise SpectralError(f"characteristic identity fails: residual {res:.3g}")
    return UVector(u, tuple(bool(abs(c) < 1e-12) for c in u))


def solve_A0(xi: Sequence, x: RationalLike, u0: UVector | np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Special unitary A with A delta A^-1 = mu_hat(y, u0) delta."""
    u = u0.components if isinstance(u0, UVector) else np.asarray(u0, dtype=complex)
    delta = delta_of(xi)
    n = len(u)
    M = mu_hat(_radians(x), u) @ delta.matrix
    vals = [b.value for b in delta.blocks]
    A = np.zeros((n, n), dtype=complex)
    for k, blk in enumerate(delta.blocks):
        P = np.eye(n, dtype=complex)
        for j, v in enumerate(vals):
            if j != k:
                P = P @ (M - v * np.eye(n)) / (vals[k] - v)
        basis = []
        start = blk.indices[0]
        for step in range(1, n + 1):
            if len(basis) == blk.multiplicity:
                break
            e = np.zeros(n, dtype=complex)
            e[(start - step) % n] = 1
            v = P @ e
            for b in basis:
                v -= np.vdot(b, v) * b
            nv = np.linalg.norm(v)
            if nv > 1e-6:
                basis.append(v / nv)
        if len(basis) != blk.multiplicity:
            raise SpectralError(f"eigenspace for block {blk.indices} has the wrong dimension")
        for idx, v in zip(blk.indices, basis):
            lead = v[np.flatnonzero(np.abs(v) > 1e-9)[0]]
            A[:, idx] = v * (abs(lead) / lead)
    det = np.linalg.det(A)
    A[:, -1] *= np.conj(det) / abs(det)
    res = np.max(np.abs(A @ delta.matrix - M @ A))
    if res > tol:
        raise SpectralError(f"eigenvector matching failed: residual {res:.3g}")
    return A


def unitarity_defect(U: np.ndarray) -> float:
    U = np.asarray(U)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))
