from fractions import Fraction

import numpy as np
import pytest

from alcove_kit import fiber as Fb
from alcove_kit import polytope as P
from alcove_kit.spectral import delta_of, mu_hat

F = Fraction


def sphere3_count(n, x):
    model = P.build_h_representation(n, x)
    return sum(Fb.fiber_report(v, x).recognized_type.kind == "Sphere3" for v in model.vertices)


@pytest.mark.parametrize("n,x,count", [(4, F(5, 12), 4), (5, F(7, 24), 10), (6, F(9, 40), 18),
                                       (7, F(11, 60), 28), (7, F(23, 120), 28)], ids=str)
def test_sphere3_counts_on_main_interval(n, x, count):
    assert count == n * (n - 3)
    assert sphere3_count(n, x) == count


def test_sphere3_total_on_main_intervals():
    cases = [(4, F(5, 12)), (5, F(7, 24)), (6, F(9, 40)), (7, F(23, 120))]
    assert sum(sphere3_count(n, x) for n, x in cases) == 60


def test_below_main_interval_no_sphere3():
    # 23/160 lies in (1/7, 1/6): the n = 7 singular vertices have other patterns
    assert sphere3_count(7, F(23, 160)) == 0


@pytest.mark.parametrize("n,x", [(4, F(5, 12)), (5, F(7, 24)), (6, F(9, 40)), (6, F(3, 7)), (7, F(3, 10))], ids=str)
def test_face_barycentres_have_face_dimensional_tori(n, x):
    model = P.build_h_representation(n, x)
    lat = model.lattice
    for dim, faces in enumerate(lat.faces):
        for face in faces:
            pts = [model.vertices[i] for i in face.vertices]
            bary = tuple(sum(c) / len(pts) for c in zip(*pts))
            if min(bary) == 0:
                continue
            rep = Fb.fiber_report(bary, x)
            assert rep.recognized_type.kind in ("Torus", "Point")
            assert rep.fiber_dim == dim
            assert sum(m <= 1e-12 for m in rep.masses) == n - 1 - dim


def test_structure_dimensions():
    x = F(5, 12)
    rep = Fb.fiber_report((F(0), x, 1 - 2 * x, x), x)
    assert rep.isotropy.group_dim == 4 + 1 + 1 - 1
    assert rep.isotropy.description == "S(U(2) x U(1) x U(1))"
    assert rep.stabilizer.group_dim == 2
    assert rep.fiber_dim == 3 and str(rep.recognized_type) == "Sphere3"

    star = Fb.fiber_report((F(1, 4),) * 4, x)
    assert star.fiber_dim == 3 and str(star.recognized_type) == "Torus(3)"


def test_n9_double_zero_verdict():
    x = F(3, 10)
    v = P.evaluate_point(P.prop56_vertex(), x)
    assert str(Fb.fiber_report(v, x).recognized_type) == "Conjectural(SU(3))"


def test_outside_point_rejected():
    with pytest.raises(ValueError):
        Fb.fiber_report((F(1), F(0), F(0), F(0)), F(5, 12))


def test_gauge_fix_representative():
    x = F(7, 24)
    v = P.evaluate_point(P.vertex_I(5, 1), x)
    gauge = Fb.SphereGauge(v, x)
    rng = np.random.default_rng(3)
    d = delta_of(v).matrix
    y = float(x) * np.pi
    mud = mu_hat(y, gauge.u0.components) @ d
    for _ in range(20):
        T = gauge.random_isotropy(rng)
        assert abs(np.linalg.det(T) - 1) < 1e-12
        out = gauge.fix(T)
        assert np.allclose(out.Z.conj().T @ out.Z, np.eye(2))
        assert abs(np.linalg.det(out.Z) - 1) < 1e-9
        # X belongs to the stabilizer: commutes with delta and mu_hat delta
        assert np.max(np.abs(out.X @ d - d @ out.X)) < 1e-9
        assert np.max(np.abs(out.X @ mud - mud @ out.X)) < 1e-9


def test_gauge_rejects_regular_vertex():
    x = F(5, 12)
    regular = next(v for v in P.build_h_representation(4, x).vertices if min(v) > 0)
    with pytest.raises(Fb.UnsupportedPattern):
        Fb.SphereGauge(regular, x)


def test_twisted_action_checks_commutation():
    x = F(5, 12)
    v = (F(0), x, 1 - 2 * x, x)
    g = Fb.SphereGauge(v, x)
    rng = np.random.default_rng(0)
    Q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    with pytest.raises(ValueError):
        Fb.twisted_action(np.eye(4), Q, g.A0, delta=g.delta.matrix)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_orbit_suite_seeds(seed):
    x = F(9, 40)
    v = P.evaluate_point(P.vertex_I(6, 2), x)
    out = Fb.orbit_invariance_suite(v, x, samples=30, seed=seed)
    assert out.passed and out.max_gauge_drift < 1e-8
