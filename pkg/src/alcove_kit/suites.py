"""Reproduction suites comparing computed data with the tabulated values in
``data/expected.json``."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache
from importlib import resources
from typing import Any, Callable

import numpy as np

from . import dynamics, fiber, polytope
from .farey import IntervalType, classify_intervals, interval_counts_table, interval_of
from .rational import AffineForm, format_rational, parse_rational

SCHEMA = "alcove-kit/1"


@cache
def expected() -> dict:
    with resources.files("alcove_kit").joinpath("data/expected.json").open() as fh:
        return json.load(fh)


@dataclass
class Case:
    id: str
    expected: Any
    actual: Any
    status: str  # pass, fail or skipped
    citation: str = ""
    note: str = ""


@dataclass
class SuiteReport:
    suite_name: str
    seed: int = 0
    cases: list[Case] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.cases)

    def add(self, id: str, expected: Any, actual: Any, ok: bool | None,
            citation: str = "", note: str = "") -> Case:
        status = "skipped" if ok is None else ("pass" if ok else "fail")
        case = Case(id, expected, actual, status, citation, note)
        self.cases.append(case)
        return case


def _x(s: str) -> Fraction:
    return parse_rational(s)


def _point(rows) -> tuple[AffineForm, ...]:
    return tuple(AffineForm.from_json(r) for r in rows)


def _fmt_point(p) -> list[str]:
    return [str(c) if isinstance(c, AffineForm) else format_rational(c) for c in p]


def _interval(rec) -> tuple[Fraction, Fraction]:
    lo, hi = rec["interval"]
    return _x(lo), _x(hi)


# --------------------------------------------------------------------------


def suite_appendix_vectors(rep: SuiteReport, opts: dict) -> None:
    for rec in expected()["face_vectors"]:
        lo, hi = _interval(rec)
        n = rec["n"]
        model = polytope.build_h_representation(n, (lo + hi) / 2)
        got = list(model.face_vector)
        rep.add(f"n={n} {rec['interval'][0]}<x<{rec['interval'][1]}", rec["face_vector"], got,
                got == rec["face_vector"], rec["citation"])


def suite_appendix_vertices(rep: SuiteReport, opts: dict) -> None:
    for rec in expected()["vertex_tables"]:
        lo, hi = _interval(rec)
        n = rec["n"]
        sym = polytope.symbolic_vertices(n, interval_of((lo + hi) / 2, n))
        orbit_of = {}
        for cls in sym.classes:
            for r in polytope.rotations(cls.representative):
                orbit_of[r] = cls.representative
        for label, rows in rec["rows"].items():
            row = _point(rows)
            hit = orbit_of.get(row)
            rep.add(f"n={n} {rec['interval'][0]}<x<{rec['interval'][1]} {label}", _fmt_point(row),
                    _fmt_point(hit) if hit else None, hit is not None, rec["citation"])


def suite_interval_counts(rep: SuiteReport, opts: dict) -> None:
    rows = {r["n"]: r for r in expected()["interval_counts"]}
    for n, n1, n2 in interval_counts_table(min(rows), max(rows)):
        r = rows[n]
        rep.add(f"intervals n={n}", [r["type_i"], r["type_ii"]], [n1, n2],
                [n1, n2] == [r["type_i"], r["type_ii"]], r["citation"])
    for n, r in sorted(rows.items()):
        want = [r["min_classes"], r["max_classes"]]
        if n > 12 and not opts.get("stretch"):
            rep.add(f"classes n={n}", want, None, None, r["citation"], "needs --stretch")
            continue
        ivs = [iv for iv in classify_intervals(n) if iv.interval_type is IntervalType.TypeII]
        counts = polytope.class_counts(n, ivs, workers=opts.get("workers"))
        got = [min(counts), max(counts)]
        rep.add(f"classes n={n}", want, got, got == want, r["citation"])


def suite_thm51(rep: SuiteReport, opts: dict) -> None:
    for rec in expected()["thm51"]:
        n = rec["n"]
        if opts.get("n") and opts["n"] != n:
            continue
        r = polytope.check_theorem_5_1(n, _x(rec["x"]))
        want = [rec["vertices"], rec["facets"], rec["singular"], rec["le_incidence"], rec["ge_incidence"]]
        got = [r.vertex_count, r.facet_count, r.singular_count, r.le_facet_incidence, r.ge_facet_incidence]
        rep.add(f"n={n} x={rec['x']} counts", want, got, got == want, rec["citation"])
        present = [r.R_present] + [r.I_present[s] for s in sorted(r.I_present)]
        rep.add(f"n={n} x={rec['x']} R and I_s present", [True] * len(present), present,
                all(present), rec["citation"])


def _fiber_case(n: int, x: Fraction):
    model = polytope.build_h_representation(n, x)
    verdicts = {v: fiber.fiber_report(v, x) for v in model.vertices}
    star = fiber.fiber_report((Fraction(1, n),) * n, x)
    return model, verdicts, star


def suite_fiber_s3(rep: SuiteReport, opts: dict) -> None:
    spec = expected()["fiber_s3"]
    total = 0
    seed = opts.get("seed", 0)
    for case in spec["cases"]:
        n, x = case["n"], _x(case["x"])
        model, verdicts, star = _fiber_case(n, x)
        tag = f"n={n} x={case['x']}"
        iv = interval_of(x, n)
        in_range = iv.lower == Fraction(1, n - 1) and iv.upper == Fraction(1, n - 2)
        note = "" if in_range else (
            f"x lies in ({format_rational(iv.lower)}, {format_rational(iv.upper)}), "
            f"not in (1/{n - 1}, 1/{n - 2})")
        rep.add(f"{tag} center", f"Torus({n - 1})", str(star.recognized_type),
                str(star.recognized_type) == f"Torus({n - 1})", spec["citation"])
        regular = [r for v, r in verdicts.items() if min(v) > 0]
        rep.add(f"{tag} regular vertices", "Point", sorted({str(r.recognized_type) for r in regular}),
                all(r.recognized_type.kind == "Point" and r.fiber_dim == 0 for r in regular), spec["citation"])
        singular = [r for v, r in verdicts.items() if min(v) == 0]
        s3 = sum(r.recognized_type.kind == "Sphere3" and r.fiber_dim == 3 for r in singular)
        total += s3
        rep.add(f"{tag} Sphere3 verdicts", n * (n - 3), s3, s3 == n * (n - 3) and s3 == len(singular),
                spec["citation"], note)
        for s in range(1, n - 2):
            v = polytope.evaluate_point(polytope.vertex_I(n, s), x)
            if v not in verdicts:
                rep.add(f"{tag} orbit suite I_{s}", "pass", "vertex absent", False, spec["citation"], note)
                continue
            out = fiber.orbit_invariance_suite(v, x, spec["samples"], seed)
            rep.add(f"{tag} orbit suite I_{s}", "pass", "pass" if out.passed else out.failures[:3],
                    out.passed, spec["citation"])
    rep.add("total Sphere3 verdicts", spec["total_sphere3"], total, total == spec["total_sphere3"],
            spec["citation"])


def dynamics_grid(n: int, x: Fraction, samples: int, seed: int) -> dict[str, float]:
    rng = np.random.default_rng(seed)
    model = polytope.build_h_representation(n, x)
    V = np.array([[float(c) for c in v] for v in model.vertices])
    y = float(x) * np.pi
    worst = {"unitarity": 0.0, "det": 0.0, "moment": 0.0, "trace": 0.0}
    for _ in range(samples):
        xi = rng.dirichlet(np.ones(len(V))) @ V
        theta = rng.uniform(-np.pi, np.pi, n - 1)
        u, d = dynamics.lax_defects(xi, theta, x)
        cs = dynamics.cross_section(xi, theta, x).residual(y)
        q, p = dynamics.rs_coordinates(xi, theta)
        tr = abs(dynamics.rs_hamiltonian(q, p, y) - dynamics.trace_hamiltonian(xi, theta, x))
        for key, val in zip(worst, (u, d, cs, tr)):
            worst[key] = max(worst[key], val)
    return worst


def fiber_flow_grid(samples: int, seed: int, tol: float) -> dict[str, float]:
    rng = np.random.default_rng(seed)
    x = Fraction(5, 12)
    xi = (Fraction(0), x, 1 - 2 * x, x)
    worst = {"deviation": 0.0, "periodicity": 0.0}
    ts = [np.pi / 3, 1.0, np.pi, 2 * np.pi]
    for _ in range(samples):
        Z0 = dynamics.random_su2(rng)
        for which in (1, 2):
            r = dynamics.fiber_flow_check(xi, x, which, ts, Z0, tol)
            worst["deviation"] = max(worst["deviation"], r.max_deviation)
            worst["periodicity"] = max(worst["periodicity"], r.periodicity)
    return worst


def suite_dynamics(rep: SuiteReport, opts: dict) -> None:
    spec = expected()["dynamics"]
    seed = opts.get("seed", 0)
    tol = spec["tol"]
    for case in spec["cases"]:
        n, x = case["n"], _x(case["x"])
        w = dynamics_grid(n, x, spec["samples"], seed)
        for key, val in w.items():
            rep.add(f"n={n} x={case['x']} {key}", f"<{tol:g}", f"{val:.3e}", val < tol, spec["citation"])
    w = fiber_flow_grid(spec["fiber_flow_samples"], seed, spec["flow_tol"])
    for key, val in w.items():
        rep.add(f"fiber flow {key}", f"<{spec['flow_tol']:g}", f"{val:.3e}", val < spec["flow_tol"],
                spec["citation"])


def suite_prop56(rep: SuiteReport, opts: dict) -> None:
    spec = expected()["prop56"]
    n, x = spec["n"], _x(spec["x"])
    model = polytope.build_h_representation(n, x)
    v = polytope.evaluate_point(_point(spec["vertex"]), x)
    rep.add("vertex found", True, v in set(model.vertices), v in set(model.vertices), spec["citation"])
    double = [c for c in model.classes
              if any(c.representative[j] == 0 and c.representative[(j + 1) % n] == 0 for j in range(n))]
    reps = [_fmt_point(c.representative) for c in double]
    ok = len(double) == 1 and v in polytope.rotations(double[0].representative)
    rep.add("unique class with two consecutive zeros", 1, len(double), ok, spec["citation"],
            "; ".join(",".join(r) for r in reps))
    m = polytope.contains(v, model)
    rep.add("active constraints", f"{spec['active']} of {spec['constraints']}",
            f"{len(m.active)} of {len(model.inequalities)}", len(m.active) == spec["active"], spec["citation"])


def suite_edge_directions(rep: SuiteReport, opts: dict) -> None:
    spec = expected()["edge_directions"]
    targets = [tuple(d) for d in spec["directions"]]
    for xs in spec["xs"]:
        x = _x(xs)
        model = polytope.build_h_representation(4, x)
        v = polytope.evaluate_point(_point(spec["vertex"]), x)
        mapped = [polytope.chart_n4(d) for d in polytope.edge_directions_at(v, model)]
        matched = all(any(polytope.positive_multiple(m, t) for m in mapped) for t in targets)
        ok = len(mapped) == 4 and matched
        rep.add(f"x={xs} singular vertex", [list(t) for t in targets],
                [list(polytope.primitive_vector(m)) for m in mapped], ok, spec["citation"])
        dets = []
        for w in model.vertices:
            if min(w) == 0:
                continue
            dirs = [polytope.primitive_vector(d[:3]) for d in polytope.edge_directions_at(w, model)]
            dets.append(round(np.linalg.det(np.array(dirs, dtype=float))) if len(dirs) == 3 else 0)
        rep.add(f"x={xs} regular vertices unimodular", [1] * len(dets), [abs(d) for d in dets],
                all(abs(d) == 1 for d in dets), spec["citation"])


SUITES: dict[str, Callable[[SuiteReport, dict], None]] = {
    "appendixC-vectors": suite_appendix_vectors,
    "appendixC-vertices": suite_appendix_vertices,
    "interval-counts": suite_interval_counts,
    "thm51": suite_thm51,
    "fiber-s3": suite_fiber_s3,
    "dynamics": suite_dynamics,
    "prop56": suite_prop56,
    "edge-directions": suite_edge_directions,
}


def run_suite(name: str, **opts) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    rep = SuiteReport(name, opts.get("seed", 0))
    t0 = time.perf_counter()
    SUITES[name](rep, opts)
    rep.elapsed = time.perf_counter() - t0
    return rep
