from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alcove_kit import dynamics as Dy
from alcove_kit.spectral import delta_of

F = Fraction


def random_su(n, rng):
    Q, R = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    return Q / np.linalg.det(Q) ** (1 / n)


def random_su_algebra(n, rng):
    H = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    X = H - H.conj().T
    return X - np.eye(n) * np.trace(X) / n


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("k", [1, -1, 2, -2, 3, -3])
def test_gradient_matches_central_difference(n, k):
    rng = np.random.default_rng(10 * n + k)
    g = random_su(n, rng)
    Y = random_su_algebra(n, rng)
    exact = Dy.pairing(Dy.gradient_phi(k, g), Y)

    def fd(h):
        plus = Dy.phi(k, g @ Dy.expm_antihermitian(Y, h))
        minus = Dy.phi(k, g @ Dy.expm_antihermitian(Y, -h))
        return (plus - minus) / (2 * h)

    e1, e2 = abs(fd(2e-3) - exact), abs(fd(1e-3) - exact)
    assert e2 < 1e-4 * max(1, abs(exact))
    if e1 > 1e-9:
        assert 3.0 < e1 / e2 < 5.0  # second-order convergence


def test_gradient_is_traceless_antihermitian():
    rng = np.random.default_rng(1)
    g = random_su(5, rng)
    for k in Dy.basis_labels(5):
        G = Dy.gradient_phi(k, g)
        assert np.allclose(G, -G.conj().T)
        assert abs(np.trace(G)) < 1e-12
    with pytest.raises(ValueError):
        Dy.gradient_phi(0, g)


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=2, max_size=7))
def test_reflection(vec):
    v = np.array(vec)
    nv = np.linalg.norm(v)
    if nv < 1e-3:
        return
    v = v / nv
    if v[-1] < -1 + 1e-6:
        return
    g = Dy.reflection_g(v)
    assert np.allclose(g.T @ g, np.eye(len(v)), atol=1e-9)
    assert np.allclose(g[:, -1], v)


def test_reflection_singular():
    with pytest.raises(ValueError):
        Dy.reflection_g([0.0, 0.0, -1.0])


@settings(deadline=None)
@given(st.integers(2, 6), st.integers(0, 10_000))
def test_householder(n, seed):
    rng = np.random.default_rng(seed)
    u = rng.normal(size=n) + 1j * rng.normal(size=n)
    u[-1] = abs(u[-1])
    u /= np.linalg.norm(u)
    g = Dy.householder_to(u)
    e = np.zeros(n)
    e[-1] = 1
    assert np.allclose(g @ e, u)
    assert np.allclose(g.conj().T @ g, np.eye(n))
    assert abs(np.linalg.det(g) - 1) < 1e-9


def test_householder_rejects_complex_last_entry():
    with pytest.raises(ValueError):
        Dy.householder_to(np.array([0.6, 0.8j]))


@given(st.integers(2, 12), st.fractions(min_value=0, max_value=1, max_denominator=97))
def test_sign_factor(n, x):
    if not 0 < x < 1 or (n * x).denominator == 1:
        return
    y = float(x) * np.pi
    assert Dy.sign_factor(n, x) == np.sign(np.sin(y) / np.sin(n * y))


def test_rs_hamiltonian_symmetric_under_relabelling():
    rng = np.random.default_rng(0)
    y = 0.3
    q = np.array([0.0, 0.9, 1.9, 2.6])
    p = rng.uniform(-1, 1, 4)
    perm = rng.permutation(4)
    assert abs(Dy.rs_hamiltonian(q, p, y) - Dy.rs_hamiltonian(q[perm], p[perm], y)) < 1e-12
    with pytest.raises(ValueError):
        Dy.rs_hamiltonian([0.0, 0.1, 2.0], [0, 0, 0], 1.2)


def test_lax_rejects_boundary_points():
    x = F(5, 12)
    with pytest.raises(Dy.BoundaryError):
        Dy.lax_local((F(0), x, 1 - 2 * x, x), [0.1, 0.2, 0.3], x)


def test_lax_at_centre_is_special_unitary():
    x = F(7, 24)
    xi = (F(1, 5),) * 5
    L = Dy.lax_local(xi, [0.3, -0.2, 1.0, 0.5], x)
    assert np.allclose(L.conj().T @ L, np.eye(5))
    assert abs(np.linalg.det(L) - 1) < 1e-10


def test_b_flow_preserves_moment_map():
    x = F(5, 12)
    y = float(x) * np.pi
    xi = (F(1, 4), F(1, 5), F(3, 10), F(1, 4))
    pt = Dy.cross_section(xi, [0.4, -0.7, 1.1], x)
    target = np.diag(-1j * np.array([1.0, -2.0, 0.5, 0.5]))
    coef = Dy.build_center_gradient(xi, target)
    grad = Dy.hamiltonian_gradient(coef, pt.B)
    for t in (0.1, 1.0, 3.0):
        A, B = Dy.flow_b_hamiltonian((pt.A, pt.B), grad, t)
        C = A @ B @ A.conj().T @ B.conj().T
        assert np.max(np.abs(C - Dy.mu_zero(4, y))) < 1e-9


def test_center_gradient_rejects_offdiagonal():
    xi = (F(1, 4),) * 4
    with pytest.raises(ValueError):
        Dy.build_center_gradient(xi, np.ones((4, 4)) * 1j)


@pytest.mark.parametrize("which", [1, 2])
def test_fiber_flow_moment_drift(which):
    x = F(5, 12)
    xi = (F(0), x, 1 - 2 * x, x)
    Z0 = Dy.random_su2(np.random.default_rng(4))
    out = Dy.fiber_flow_check(xi, x, which, [0.5, 2.0], Z0)
    assert out.passed and out.moment_drift < 1e-9


def test_fiber_flow_arguments():
    x = F(5, 12)
    xi = (F(0), x, 1 - 2 * x, x)
    with pytest.raises(ValueError):
        Dy.fiber_flow_check(xi, x, 3, [1.0], np.eye(2))
    with pytest.raises(ValueError):
        Dy.fiber_flow_check((F(1, 5),) * 5, F(7, 24), 1, [1.0], np.eye(2))


def test_rs_coordinates_match_delta():
    xi = (F(1, 6), F(1, 3), F(1, 2))
    q, p = Dy.rs_coordinates(xi, [0.2, 0.5])
    assert np.allclose(np.exp(2j * q), delta_of(xi).diagonal)
    assert np.allclose(p, [-0.2, -0.3, 0.5])
