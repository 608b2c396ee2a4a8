"""Lax matrix, cross-section of the moment-map level set, and b-flows."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .fiber import SphereGauge
from .rational import RationalLike, as_fraction
from .spectral import delta_of, mu_zero, unitarity_defect, z_forms


class BoundaryError(ValueError):
    pass


def reflection_g(v: Sequence[float], tol: float = 1e-12) -> np.ndarray:
    """Real orthogonal matrix with last column v."""
    v = np.asarray(v, dtype=float)
    if abs(np.dot(v, v) - 1) > 1e-10:
        raise ValueError("v must be a unit vector")
    if v[-1] <= -1 + tol:
        raise ValueError("reflection is singular at v_n = -1")
    n = len(v)
    g = np.eye(n) - np.outer(v, v) / (1 + v[-1])
    g[:, -1] = v
    g[-1, :-1] = -v[:-1]
    g[-1, -1] = v[-1]
    return g


def sign_factor(n: int, x: RationalLike) -> int:
    """Sign of sin(y)/sin(ny) from the exact position of x: (-1)^floor(nx)."""
    return -1 if int(n * as_fraction(x)) % 2 else 1


def _positive_z(xi: Sequence, y: float) -> np.ndarray:
    if not delta_of(xi).is_regular:
        raise BoundaryError("xi is not in the interior: delta(xi) has a repeated eigenvalue")
    zp, zs = z_forms(xi, y)
    if np.min(zs) <= 0:
        raise BoundaryError("xi is not in the interior: some z is not positive")
    return zs


def lax_local(xi: Sequence, theta: Sequence[float], x: RationalLike) -> np.ndarray:
    n = len(xi)
    theta = np.asarray(theta, dtype=float)
    if len(theta) != n - 1:
        raise ValueError(f"expected {n - 1} angles")
    y = float(x) * np.pi
    d = delta_of(xi).diagonal
    v = np.sqrt(_positive_z(xi, y))
    w = np.sqrt(_positive_z(xi, np.pi - y))
    th = np.concatenate([[0.0], theta, [0.0]])
    rho = np.exp(1j * (th[:-1] - th[1:]))
    pref = np.sin(n * y) / np.sin(y) * 2j * np.sin(y)
    ratio = np.outer(d, 1 / d)
    return pref / (np.exp(1j * y) * ratio - np.exp(-1j * y)) * np.outer(v, w * rho)


@dataclass(frozen=True)
class CrossSectionPoint:
    xi: tuple
    theta: np.ndarray
    A: np.ndarray
    B: np.ndarray

    def residual(self, y: float) -> float:
        A, B = self.A, self.B
        C = A @ B @ A.conj().T @ B.conj().T
        return float(np.max(np.abs(C - mu_zero(len(self.xi), y))))


def cross_section(xi: Sequence, theta: Sequence[float], x: RationalLike) -> CrossSectionPoint:
    y = float(x) * np.pi
    g = reflection_g(np.sqrt(_positive_z(xi, y)))
    L = lax_local(xi, theta, x)
    D = delta_of(xi).matrix
    return CrossSectionPoint(tuple(xi), np.asarray(theta), g.T @ L @ g, g.T @ D @ g)


def rs_hamiltonian(q: Sequence[float], p: Sequence[float], y: float) -> float:
    """sum_l cos(p_l) prod_{j != l} [1 - sin^2 y / sin^2(q_l - q_j)]^(1/2)."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    total = 0.0
    for l in range(len(q)):
        f = 1 - np.sin(y) ** 2 / np.sin(q[l] - np.delete(q, l)) ** 2
        prod = np.prod(f)
        if prod < 0:
            raise ValueError("configuration outside the domain: negative product under the root")
        total += np.cos(p[l]) * np.sqrt(prod)
    return float(total)


def trace_hamiltonian(xi: Sequence, theta: Sequence[float], x: RationalLike) -> float:
    """Re(s tr L) with s the sign of sin(y)/sin(ny)."""
    n = len(xi)
    return float((sign_factor(n, x) * np.trace(lax_local(xi, theta, x))).real)


def rs_coordinates(xi: Sequence, theta: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """q with delta_j = exp(2 i q_j) and p_l = theta_{l-1} - theta_l."""
    q = np.angle(delta_of(xi).diagonal) / 2
    th = np.concatenate([[0.0], np.asarray(theta, dtype=float), [0.0]])
    return q, th[:-1] - th[1:]


def matrix_power(g: np.ndarray, k: int) -> np.ndarray:
    return np.linalg.matrix_power(g, k) if k >= 0 else np.linalg.matrix_power(g.conj().T, -k)


def gradient_phi(k: int, g: np.ndarray) -> np.ndarray:
    """Gradient of phi_k = Re tr(g^k)/k (k > 0) or phi_{-k} = Im tr(g^k)/k, for the
    pairing <X, Y> = -tr(XY)/2."""
    if k == 0:
        raise ValueError("k must be nonzero")
    n = g.shape[0]
    m = abs(k)
    gp, gm = matrix_power(g, m), matrix_power(g, -m)
    one = np.eye(n)
    if k > 0:
        return (gm - gp) + one * np.trace(gp - gm) / n
    return 1j * (gp + gm) - 1j * one * np.trace(gp + gm) / n


def phi(k: int, g: np.ndarray) -> float:
    t = np.trace(matrix_power(g, abs(k))) / abs(k)
    return float(t.real if k > 0 else t.imag)


def pairing(X: np.ndarray, Y: np.ndarray) -> float:
    return float((-0.5 * np.trace(X @ Y)).real)


def basis_labels(n: int) -> list[int]:
    return [s * k for k in range(1, n + 1) for s in (1, -1)]


def build_center_gradient(xi: Sequence, target: np.ndarray, tol: float = 1e-9) -> dict[int, float]:
    """Real coefficients c_k with sum c_k grad phi_k(delta(xi)) = target."""
    D = delta_of(xi).matrix
    target = np.asarray(target, dtype=complex)
    labels = basis_labels(D.shape[0])
    cols = [np.diag(gradient_phi(k, D)) for k in labels]
    M = np.vstack([np.real(cols).T, np.imag(cols).T])
    rhs = np.concatenate([np.diag(target).real, np.diag(target).imag])
    if np.max(np.abs(target - np.diag(np.diag(target)))) > tol:
        raise ValueError("target must be diagonal")
    coef, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    coef[np.abs(coef) < 1e-14] = 0.0
    res = np.max(np.abs(M @ coef - rhs)) if len(rhs) else 0.0
    if res > tol:
        raise ValueError(f"target is outside the span of class-function gradients (residual {res:.3g})")
    return dict(zip(labels, coef.tolist()))


def hamiltonian_gradient(coef: dict[int, float], g: np.ndarray) -> np.ndarray:
    out = np.zeros_like(g, dtype=complex)
    for k, c in coef.items():
        if c:
            out += c * gradient_phi(k, g)
    return out


def expm_antihermitian(X: np.ndarray, t: float) -> np.ndarray:
    w, V = np.linalg.eigh(-1j * X)
    return (V * np.exp(1j * t * w)) @ V.conj().T


def flow_b_hamiltonian(point: tuple[np.ndarray, np.ndarray], h_gradient: np.ndarray, t: float,
                       tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """(A, B) -> (A exp(t grad h(B)), B)."""
    A, B = point
    if np.max(np.abs(h_gradient @ B - B @ h_gradient)) > tol:
        raise ValueError("gradient does not commute with B")
    return A @ expm_antihermitian(h_gradient, t), B


def householder_to(u: np.ndarray) -> np.ndarray:
    """Special unitary g with g e_n = u."""
    u = np.asarray(u, dtype=complex)
    n = len(u)
    e = np.zeros(n, dtype=complex)
    e[-1] = 1
    w = e - u
    if np.linalg.norm(w) < 1e-14:
        return np.eye(n, dtype=complex)
    if abs(u[-1].imag) > 1e-12:
        raise ValueError("last component of u must be real")
    g = np.eye(n) - 2 * np.outer(w, w.conj()) / np.vdot(w, w)
    det = np.linalg.det(g)
    g[:, 0] *= np.conj(det) / abs(det)
    return g


def fiber_generators(gauge: SphereGauge) -> tuple[np.ndarray, np.ndarray]:
    """-i(+1 on the pair, -1 on the two following singletons) and -i(e_s1 - e_s2)."""
    n = gauge.n
    last = gauge.pair.last
    s1, s2 = (last + 1) % n, (last + 2) % n
    X1 = np.zeros(n, dtype=complex)
    X1[list(gauge.pair.indices)] = 1
    X1[[s1, s2]] = -1
    X2 = np.zeros(n, dtype=complex)
    X2[s1], X2[s2] = 1, -1
    return np.diag(-1j * X1), np.diag(-1j * X2)


def expected_Z(which: int, Z0: np.ndarray, t: float) -> np.ndarray:
    a = np.diag([np.exp(1j * t), 1])
    if which == 1:
        return a @ Z0 @ np.diag([1, np.exp(-1j * t)])
    return a @ Z0 @ np.diag([np.exp(-1j * t), 1])


@dataclass
class FlowCheck:
    passed: bool
    max_deviation: float
    worst_t: float
    periodicity: float
    moment_drift: float


def random_su2(rng: np.random.Generator) -> np.ndarray:
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    return np.array([[q[0] + 1j * q[1], q[2] + 1j * q[3]], [-q[2] + 1j * q[3], q[0] - 1j * q[1]]])


def fiber_flow_check(xi: Sequence[RationalLike], x: RationalLike, which: int,
                     t_samples: Sequence[float], Z0: np.ndarray, tol: float = 1e-7) -> FlowCheck:
    xi = tuple(map(as_fraction, xi))
    x = as_fraction(x)
    if len(xi) != 4:
        raise ValueError("fiber flows are implemented for n = 4")
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    gauge = SphereGauge(xi, x)
    g0 = householder_to(gauge.u0.components)
    D = gauge.delta.matrix
    B = g0.conj().T @ D @ g0
    A = g0.conj().T @ gauge.A0 @ gauge.embed(Z0) @ g0
    target = fiber_generators(gauge)[which - 1]
    coef = build_center_gradient(xi, target)
    grad = hamiltonian_gradient(coef, B)
    y = float(x) * np.pi
    mu = mu_zero(4, y)

    def moment(Ap):
        return float(np.max(np.abs(Ap @ B @ Ap.conj().T @ B.conj().T - mu)))

    base = moment(A)
    worst, worst_t, drift = 0.0, 0.0, 0.0
    for t in list(t_samples) + [2 * np.pi]:
        At, _ = flow_b_hamiltonian((A, B), grad, t)
        drift = max(drift, abs(moment(At) - base))
        T = gauge.A0.conj().T @ g0 @ At @ g0.conj().T
        Z = gauge.fix(T).Z
        dev = float(np.max(np.abs(Z - expected_Z(which, Z0, t))))
        if dev > worst:
            worst, worst_t = dev, t
    A2pi, _ = flow_b_hamiltonian((A, B), grad, 2 * np.pi)
    period = float(np.max(np.abs(A2pi - A)))
    return FlowCheck(worst < tol and period < tol, worst, worst_t, period, drift)


def lax_defects(xi: Sequence, theta: Sequence[float], x: RationalLike) -> tuple[float, float]:
    L = lax_local(xi, theta, x)
    return unitarity_defect(L), float(abs(np.linalg.det(L) - 1))
