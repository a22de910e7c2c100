"""Command-line front end: generation, classification, homotopies, export.

Outputs are deterministic for a fixed seed: floats are serialized with 17
significant digits and dictionaries keep insertion order.  Curve streams
are JSONL (one curve per line, trailing report object).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import factory, goodbands, grafting, homotopy
from .bands import caustic_band, regular_band
from .classify import classify_component, condensed_status, reduce_to_k0
from .curves import (
    CurvatureBounds,
    curve_from_json,
    curve_to_json,
    lift_parity,
    make_circle,
    total_curvature,
)
from .errors import SphereCurveError
from .homotopy import validate_path
from .tolerances import DEFAULT_TOL, ToleranceProfile


def _fmt(value):
    if isinstance(value, float):
        if math.isinf(value):
            return '"-inf"' if value < 0 else '"+inf"'
        return format(value, ".17g")
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_fmt(v) for v in value) + "]"
    if isinstance(value, np.ndarray):
        return _fmt(value.tolist())
    if isinstance(value, dict):
        return "{" + ",".join(f"{json.dumps(k)}:{_fmt(v)}" for k, v in value.items()) + "}"
    raise TypeError(f"cannot serialize {type(value)}")


def dumps(obj) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    return _fmt(obj)


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _tol_from_args(args) -> ToleranceProfile:
    tol = (ToleranceProfile.from_json(args.tol_profile)
           if args.tol_profile else DEFAULT_TOL)
    seed_env = os.environ.get("SPHERECURVE_SEED")
    if seed_env is not None:
        tol = tol.replace(seed=int(seed_env))
    if getattr(args, "seed", None) is not None:
        tol = tol.replace(seed=args.seed)
    return tol


def _bounds_from_args(args) -> CurvatureBounds:
    def parse(x, default):
        if x is None:
            return default
        if isinstance(x, str) and x in ("-inf", "+inf", "inf"):
            return -math.inf if x == "-inf" else math.inf
        return float(x)

    return CurvatureBounds(parse(args.kappa1, 0.0), parse(args.kappa2, math.inf))


def _load(path, tol):
    with open(path) as fh:
        return curve_from_json(json.load(fh), tol)


def _path_to_jsonl(path_obj, report) -> str:
    lines = [dumps(curve_to_json(c)) for c in path_obj.curves]
    lines.append(dumps(report))
    return "\n".join(lines)


def _report_of(rep) -> dict:
    return {
        "pass": rep.passed,
        "min_margin": rep.min_margin,
        "max_closure_defect": rep.max_closure_defect,
        "parities": list(rep.parities),
        "notes": rep.notes,
    }


def cmd_gen(args) -> int:
    tol = _tol_from_args(args)
    if args.kind == "circle":
        bounds = _bounds_from_args(args)
        curve = make_circle(args.rho, args.k, bounds, n=args.n, tol=tol)
    elif args.kind == "bending-frame":
        curve = homotopy.bend_frame(args.k, args.s, args.bend_kappa1,
                                    n=args.n, tol=tol)
    elif args.kind == "neither-example":
        curve = factory.neither_example(rho0=args.rho0, tol=tol)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(args.kind)
    _write(args.output, dumps(curve_to_json(curve)))
    return 0


def cmd_classify(args) -> int:
    tol = _tol_from_args(args)
    try:
        with open(args.input) as fh:
            doc = json.load(fh)
        curve = curve_from_json(doc, tol)
    except (json.JSONDecodeError, KeyError, ValueError, OSError) as exc:
        print(f"error: cannot parse curve: {exc}", file=sys.stderr)
        return 2
    label = classify_component(curve, tol)
    reduced, _ = reduce_to_k0(curve, tol)
    status = condensed_status(reduced, tol)
    report = label.to_dict()
    report["witnesses"] = {
        "hemisphere": None if status.hemisphere is None
        else list(status.hemisphere),
        "antipodal_defect": status.antipodal_defect,
    }
    _write(args.output, dumps(report))
    if args.strict and label.borderline:
        return 3
    return 0


def cmd_bend(args) -> int:
    tol = _tol_from_args(args)
    path = homotopy.bend_k_equator(args.k, steps=args.steps,
                                   kappa1=args.bend_kappa1, n=args.n, tol=tol)
    rep = validate_path(path, tol=tol)
    _write(args.output, _path_to_jsonl(path, _report_of(rep)))
    return 0 if rep.passed else 1


def cmd_loops(args) -> int:
    tol = _tol_from_args(args)
    curve = _load(args.input, tol)
    if args.spread:
        out = homotopy.spread_loops(curve, args.n_loops, args.rho, tol=tol)
    else:
        out = homotopy.add_loops(curve, args.t0, args.n_loops, args.rho,
                                 args.epsilon, tol=tol)
    report = {
        "pass": True,
        "parity_before": lift_parity(curve).sign,
        "parity_after": lift_parity(out).sign,
        "tot_before": total_curvature(curve),
        "tot_after": total_curvature(out),
    }
    _write(args.output, dumps(curve_to_json(out)) + "\n" + dumps(report))
    return 0


def cmd_shrink(args) -> int:
    tol = _tol_from_args(args)
    curve = _load(args.input, tol)
    path = homotopy.shrink_condensed(curve, steps=args.steps, tol=tol)
    rep = validate_path(path, tol=tol)
    _write(args.output, _path_to_jsonl(path, _report_of(rep)))
    return 0 if rep.passed else 1


def cmd_graft(args) -> int:
    tol = _tol_from_args(args)
    curve = _load(args.input, tol)
    lines = []
    if args.mode == "antipodal":
        out, rec = grafting.graft_antipodal_circles(curve, args.step, tol)
        lines.append(dumps(curve_to_json(out)))
        report = {"status": "Diffuse", "frame_defect": rec.frame_defect,
                  "tot": total_curvature(out)}
    elif args.mode == "simplex":
        out, rec = grafting.graft_simplex_step(curve, args.step, tol)
        lines.append(dumps(curve_to_json(out)))
        report = {"status": "stepped", "frame_defect": rec.frame_defect,
                  "tot": total_curvature(out)}
    else:
        out, status, history = grafting.graft_until_resolved(
            curve, step=args.step, budget=args.budget, tol=tol)
        lines.extend(dumps(curve_to_json(c)) for c in history)
        report = {"status": status.tag, "tot": total_curvature(out),
                  "steps": len(history) - 1}
    lines.append(dumps(report))
    _write(args.output, "\n".join(lines))
    return 0


def cmd_bands(args) -> int:
    tol = _tol_from_args(args)
    curve = _load(args.input, tol)
    band = goodbands.band_from_condensed(curve, tol)
    report = {
        "nu": band.nu,
        "R": band.R,
        "lam": list(band.lam[:: max(1, band.k_nodes // args.profile_nodes)]),
        "theta_plus": list(band.theta_plus[:: max(1, band.k_nodes // args.profile_nodes)]),
        "theta_minus": list(band.theta_minus[:: max(1, band.k_nodes // args.profile_nodes)]),
    }
    if args.central:
        central = goodbands.central_curve(band, tol=tol)
        report["central_curve"] = curve_to_json(central)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("lam,theta_plus,theta_minus\n")
            for lam, tp, tm in zip(band.lam, band.theta_plus, band.theta_minus):
                fh.write(f"{lam:.17g},{tp:.17g},{tm:.17g}\n")
    _write(args.output, dumps(report))
    return 0


def cmd_validate(args) -> int:
    tol = _tol_from_args(args)
    curves = []
    with open(args.input) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            if "v_hat" not in doc and "gamma" not in doc:
                continue  # trailing report object
            curves.append(curve_from_json(doc, tol))
    if not curves:
        print("error: no curves found", file=sys.stderr)
        return 2
    bounds = curves[0].bounds
    path = homotopy.HomotopyPath(bounds=bounds,
                                 s_values=np.linspace(0, 1, len(curves)),
                                 curves=tuple(curves), provenance="custom")
    rep = validate_path(path, tol=tol)
    _write(args.output, dumps(_report_of(rep)))
    return 0 if rep.passed else 1


def cmd_export_band(args) -> int:
    tol = _tol_from_args(args)
    curve = _load(args.input, tol)
    grid = (caustic_band if args.caustic else regular_band)(curve, tol=tol)
    grid.to_csv(args.csv)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spherecurve")
    p.add_argument("--tol-profile", default=None,
                   help="JSON file of tolerance overrides")
    p.add_argument("--seed", type=int, default=None)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate example curves")
    g.add_argument("kind", choices=["circle", "bending-frame", "neither-example"])
    g.add_argument("--rho", type=float, default=math.pi / 4)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--s", type=float, default=0.5)
    g.add_argument("--rho0", type=float, default=0.15)
    g.add_argument("--kappa1", default=None)
    g.add_argument("--kappa2", default=None)
    g.add_argument("--bend-kappa1", type=float, default=None)
    g.add_argument("-n", type=int, default=None)
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("classify", help="component label of a curve")
    c.add_argument("input")
    c.add_argument("--strict", action="store_true")
    c.add_argument("-o", "--output", default="-")
    c.set_defaults(func=cmd_classify)

    b = sub.add_parser("bend", help="bending of the k-equator")
    b.add_argument("--k", type=int, default=1)
    b.add_argument("--steps", type=int, default=None)
    b.add_argument("--bend-kappa1", type=float, default=None)
    b.add_argument("-n", type=int, default=None)
    b.add_argument("-o", "--output", default="-")
    b.set_defaults(func=cmd_bend)

    lo = sub.add_parser("loops", help="add or spread loops")
    lo.add_argument("input")
    lo.add_argument("--t0", type=float, default=0.5)
    lo.add_argument("--n-loops", type=int, default=1)
    lo.add_argument("--rho", type=float, default=0.2)
    lo.add_argument("--epsilon", type=float, default=0.05)
    lo.add_argument("--spread", action="store_true")
    lo.add_argument("-o", "--output", default="-")
    lo.set_defaults(func=cmd_loops)

    sh = sub.add_parser("shrink", help="shrink a condensed curve to a circle")
    sh.add_argument("input")
    sh.add_argument("--steps", type=int, default=None)
    sh.add_argument("-o", "--output", default="-")
    sh.set_defaults(func=cmd_shrink)

    gr = sub.add_parser("graft", help="graft circle arcs")
    gr.add_argument("input")
    gr.add_argument("--mode", choices=["antipodal", "simplex", "auto"],
                    default="auto")
    gr.add_argument("--step", type=float, default=None)
    gr.add_argument("--budget", type=float, default=10.0)
    gr.add_argument("-o", "--output", default="-")
    gr.set_defaults(func=cmd_graft)

    ba = sub.add_parser("bands", help="good-band profiles and central curve")
    ba.add_argument("input")
    ba.add_argument("--csv", default=None)
    ba.add_argument("--central", action="store_true")
    ba.add_argument("--profile-nodes", type=int, default=64)
    ba.add_argument("-o", "--output", default="-")
    ba.set_defaults(func=cmd_bands)

    va = sub.add_parser("validate", help="validate a JSONL curve stream")
    va.add_argument("input")
    va.add_argument("-o", "--output", default="-")
    va.set_defaults(func=cmd_validate)

    ex = sub.add_parser("export-band", help="band grid as CSV (t,theta,x,y,z)")
    ex.add_argument("input")
    ex.add_argument("csv")
    ex.add_argument("--caustic", action="store_true")
    ex.set_defaults(func=cmd_export_band)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "step", None) is None and args.command == "graft":
        args.step = _tol_from_args(args).graft_step
    try:
        return args.func(args)
    except SphereCurveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
