from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import dynamics, fiber, polytope, spectral
from .farey import classify_intervals, interval_of
from .rational import AffineForm, format_rational, parse_rational
from .suites import SCHEMA, SUITES, SuiteReport, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def point_arg(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(parse_rational(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def interval_arg(text: str) -> tuple[Fraction, Fraction]:
    pts = point_arg(text)
    if len(pts) != 2 or not pts[0] < pts[1]:
        raise argparse.ArgumentTypeError(f"expected LO,HI with LO < HI, got {text!r}")
    return pts


def _common(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--tol", type=float, default=d(1e-10))
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--format", choices=("text", "json", "csv"), default=d("text"))
    p.add_argument("--stretch", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alcove-kit", description="Momentum polytopes and fibers of compactified RS systems.")
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _common(common, suppress=True)

    p = sub.add_parser("classify", parents=[common], help="Farey intervals of order n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--full-range", action="store_true")

    p = sub.add_parser("polytope", parents=[common], help="vertices and faces of A_y")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=rational_arg)
    p.add_argument("--symbolic", action="store_true")
    p.add_argument("--interval", type=interval_arg)
    p.add_argument("--check", choices=("thm51",))

    p = sub.add_parser("spectral", parents=[common], help="delta, z, u0 and A0 at a point")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=rational_arg, required=True)
    p.add_argument("--xi", type=point_arg, required=True)
    p.add_argument("--op", choices=("z", "u", "A0", "delta"), default="delta")

    p = sub.add_parser("fiber", parents=[common], help="fiber report over a point")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=rational_arg, required=True)
    p.add_argument("--vertex", type=point_arg, required=True)
    p.add_argument("--suite", type=int, metavar="SAMPLES")

    p = sub.add_parser("dynamics", parents=[common], help="Lax matrix and flow checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=rational_arg, required=True)
    p.add_argument("--check", choices=("lax", "cross-section", "trace", "flow", "fiber-flow"), required=True)
    p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser("verify", parents=[common], help="run a reproduction suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--n", type=int)
    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


# --------------------------------------------------------------------------
# serialization


def jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, AffineForm):
        return obj.to_json()
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()] if obj.dtype.kind != "c" else [jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


def _cell(value: Any) -> str:
    return value if isinstance(value, str) else json.dumps(jsonable(value))


def emit(report: SuiteReport, fmt: str, timing: bool = False) -> str:
    if fmt == "json":
        doc = {
            "schema": SCHEMA,
            "suite": report.suite_name,
            "seed": report.seed,
            "passed": report.passed,
            "cases": [
                {"id": c.id, "expected": jsonable(c.expected), "actual": jsonable(c.actual),
                 "status": c.status, "citation": c.citation, "note": c.note}
                for c in report.cases
            ],
        }
        if timing:
            doc["elapsed"] = round(report.elapsed, 3)
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "expected", "actual", "status"])
        for c in report.cases:
            w.writerow([c.id, _cell(c.expected), _cell(c.actual), c.status])
        return buf.getvalue()
    lines = [f"suite {report.suite_name} (seed {report.seed})"]
    for c in report.cases:
        line = f"  [{c.status.upper():4}] {c.id}: expected {jsonable(c.expected)}, got {jsonable(c.actual)}"
        if c.note:
            line += f"  ({c.note})"
        lines.append(line)
    lines.append(f"{report.suite_name}: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def _dump(doc: dict) -> str:
    return json.dumps({"schema": SCHEMA, **jsonable(doc)}, indent=2) + "\n"


# --------------------------------------------------------------------------
# commands


def cmd_classify(args) -> tuple[str, int]:
    ivs = classify_intervals(args.n, restrict_to_half=not args.full_range)
    n1 = sum(iv.interval_type.value == "i" for iv in ivs)
    if args.format == "json":
        return _dump({"n": args.n, "intervals": [iv.to_json() for iv in ivs],
                      "counts": {"i": n1, "ii": len(ivs) - n1}}), EXIT_PASS
    sep = "," if args.format == "csv" else " "
    rows = [sep.join([format_rational(iv.lower), format_rational(iv.upper), iv.interval_type.value, str(iv.k_index)])
            for iv in ivs]
    rows.append(sep.join(["total", str(len(ivs)), f"i={n1}", f"ii={len(ivs) - n1}"]))
    return "\n".join(rows) + "\n", EXIT_PASS


def cmd_polytope(args) -> tuple[str, int]:
    if args.symbolic:
        if args.interval is None and args.x is None:
            raise UsageError("--symbolic needs --interval LO,HI or --x")
        mid = sum(args.interval) / 2 if args.interval else args.x
        iv = interval_of(mid, args.n)
        if args.interval and (iv.lower, iv.upper) != tuple(args.interval):
            raise UsageError("--interval must be two consecutive Farey fractions of order n")
        sym = polytope.symbolic_vertices(args.n, iv)
        classes = [{"rep": list(c.representative), "orbit": c.orbit_size, "singular": c.is_singular}
                   for c in sym.classes]
        if args.format == "json":
            return _dump({"n": args.n, "interval": [iv.lower, iv.upper], "k": iv.k_index,
                          "vertices": [list(v) for v in sym.vertices], "classes": classes}), EXIT_PASS
        if args.format == "csv":
            return "".join(",".join(str(c) for c in v) + "\n" for v in sym.vertices), EXIT_PASS
        lines = [f"n={args.n} interval ({format_rational(iv.lower)}, {format_rational(iv.upper)}) k={iv.k_index}",
                 f"{len(sym.vertices)} vertices in {len(sym.classes)} cyclic classes"]
        lines += [f"  {polytope.format_point(c.representative)} orbit={c.orbit_size}"
                  f"{' singular' if c.is_singular else ''}" for c in sym.classes]
        return "\n".join(lines) + "\n", EXIT_PASS

    if args.x is None:
        raise UsageError("polytope needs --x")
    model = polytope.build_h_representation(args.n, args.x)
    code = EXIT_PASS
    report = None
    if args.check == "thm51":
        report = polytope.check_theorem_5_1(args.n, args.x, model)
        code = EXIT_PASS if report.ok else EXIT_FAIL
    if args.format == "json":
        doc = model.to_json()
        if report is not None:
            doc["thm51"] = {"ok": report.ok, "failures": report.failures}
        return _dump(doc), code
    if args.format == "csv":
        return "".join(",".join(format_rational(c) for c in v) + "\n" for v in model.vertices), code
    lines = [f"n={model.n} x={format_rational(model.x)} k={model.k}",
             f"face vector {model.face_vector}",
             f"{len(model.vertices)} vertices in {len(model.classes)} cyclic classes"]
    lines += [f"  {polytope.format_point(c.representative)} orbit={c.orbit_size}"
              f"{' singular' if c.is_singular else ''}" for c in model.classes]
    if report is not None:
        lines.append("thm51: " + ("ok" if report.ok else "; ".join(report.failures)))
    return "\n".join(lines) + "\n", code


def _check_point(n: int, xi: Sequence) -> None:
    if len(xi) != n:
        raise UsageError(f"expected {n} coordinates, got {len(xi)}")


def cmd_spectral(args) -> tuple[str, int]:
    _check_point(args.n, args.xi)
    xi, x = args.xi, args.x
    if args.op == "delta":
        d = spectral.delta_of(xi)
        doc = {"diagonal": d.diagonal, "blocks": [list(b.indices) for b in d.blocks]}
    elif args.op == "z":
        doc = {"z": spectral.z_functions(xi, x, args.tol)}
    elif args.op == "u":
        u = spectral.solve_u(xi, x)
        doc = {"u": u.components, "zero_pattern": list(u.zero_pattern),
               "masses": [m for _, m in spectral.residue_constraints(xi, x)]}
    else:
        u = spectral.solve_u(xi, x)
        doc = {"A0": spectral.solve_A0(xi, x, u)}
    doc = {"n": args.n, "x": x, "xi": list(xi), "op": args.op, **doc}
    if args.format == "json":
        return _dump(doc), EXIT_PASS
    return "\n".join(f"{k}: {jsonable(v)}" for k, v in doc.items()) + "\n", EXIT_PASS


def cmd_fiber(args) -> tuple[str, int]:
    _check_point(args.n, args.vertex)
    rep = fiber.fiber_report(args.vertex, args.x)
    doc = {
        "n": args.n, "x": args.x, "xi": list(rep.xi),
        "blocks": [list(b.indices) for b in rep.isotropy.blocks],
        "masses": list(rep.masses),
        "isotropy": {"group": rep.isotropy.description, "dim": rep.isotropy.group_dim},
        "stabilizer": {"group": rep.stabilizer.description, "dim": rep.stabilizer.group_dim},
        "u0_zero_pattern": list(rep.u0.zero_pattern),
        "fiber_dim": rep.fiber_dim,
        "type": str(rep.recognized_type),
    }
    code = EXIT_PASS
    if args.suite:
        out = fiber.orbit_invariance_suite(args.vertex, args.x, args.suite, args.seed)
        doc["suite"] = {"passed": out.passed, "samples": out.samples, "seed": out.seed,
                        "max_commutator": out.max_commutator, "max_gauge_drift": out.max_gauge_drift,
                        "min_displacement": out.min_displacement, "failures": out.failures}
        code = EXIT_PASS if out.passed else EXIT_FAIL
    if args.format == "json":
        return _dump(doc), code
    return "\n".join(f"{k}: {jsonable(v)}" for k, v in doc.items()) + "\n", code


def cmd_dynamics(args) -> tuple[str, int]:
    tol = max(args.tol, 1e-9) if args.check != "fiber-flow" else max(args.tol, 1e-7)
    y = float(args.x) * np.pi
    rng = np.random.default_rng(args.seed)
    if args.check == "fiber-flow":
        if args.n != 4:
            raise UsageError("fiber-flow is implemented for n = 4")
        w = {"deviation": 0.0, "periodicity": 0.0}
        xi = (Fraction(0), args.x, 1 - 2 * args.x, args.x)
        for _ in range(args.samples):
            Z0 = dynamics.random_su2(rng)
            for which in (1, 2):
                r = dynamics.fiber_flow_check(xi, args.x, which, [np.pi / 3, 1.0, np.pi], Z0, tol)
                w["deviation"] = max(w["deviation"], r.max_deviation)
                w["periodicity"] = max(w["periodicity"], r.periodicity)
    else:
        model = polytope.build_h_representation(args.n, args.x)
        V = np.array([[float(c) for c in v] for v in model.vertices])
        w = {}
        for _ in range(args.samples):
            xi = rng.dirichlet(np.ones(len(V))) @ V
            theta = rng.uniform(-np.pi, np.pi, args.n - 1)
            if args.check == "lax":
                u, d = dynamics.lax_defects(xi, theta, args.x)
                vals = {"unitarity": u, "det": d}
            elif args.check == "cross-section":
                vals = {"moment": dynamics.cross_section(xi, theta, args.x).residual(y)}
            elif args.check == "trace":
                q, p = dynamics.rs_coordinates(xi, theta)
                vals = {"trace": abs(dynamics.rs_hamiltonian(q, p, y) - dynamics.trace_hamiltonian(xi, theta, args.x))}
            else:
                pt = dynamics.cross_section(xi, theta, args.x)
                coef = {k: c for k, c in zip(dynamics.basis_labels(args.n), rng.normal(size=2 * args.n))}
                grad = dynamics.hamiltonian_gradient(coef, pt.B)
                base = pt.residual(y)
                drift = 0.0
                for t in np.linspace(0, 2 * np.pi, 101):
                    A, B = dynamics.flow_b_hamiltonian((pt.A, pt.B), grad, t)
                    drift = max(drift, abs(dynamics.CrossSectionPoint(pt.xi, theta, A, B).residual(y) - base))
                vals = {"moment_drift": drift}
            for k, v in vals.items():
                w[k] = max(w.get(k, 0.0), v)
    passed = all(v < (1e-8 if k == "moment_drift" else tol) for k, v in w.items())
    doc = {"n": args.n, "x": args.x, "check": args.check, "samples": args.samples, "seed": args.seed,
           "max_residuals": w, "passed": passed}
    code = EXIT_PASS if passed else EXIT_FAIL
    if args.format == "json":
        return _dump(doc), code
    lines = [f"{args.check} n={args.n} x={format_rational(args.x)} samples={args.samples} seed={args.seed}"]
    lines += [f"  max {k}: {v:.3e}" for k, v in w.items()]
    lines.append("PASS" if passed else "FAIL")
    return "\n".join(lines) + "\n", code


def cmd_verify(args) -> tuple[str, int]:
    rep = run_suite(args.suite, seed=args.seed, stretch=args.stretch, n=args.n)
    return emit(rep, args.format), EXIT_PASS if rep.passed else EXIT_FAIL


class UsageError(Exception):
    pass


COMMANDS = {
    "classify": cmd_classify,
    "polytope": cmd_polytope,
    "spectral": cmd_spectral,
    "fiber": cmd_fiber,
    "dynamics": cmd_dynamics,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = COMMANDS[args.command](args)
    except (UsageError, polytope.InadmissibleParameter) as exc:
        parser.print_usage(sys.stderr)
        print(f"alcove-kit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, RuntimeError) as exc:
        print(f"alcove-kit: {exc}", file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
