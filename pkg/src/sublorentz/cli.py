"""Command-line surface.

Commands: classify, geodesic (shoot | connect), verify, plotdata,
reachable-sample.  Paths and plot data go out as CSV, verification reports
as JSON.  Exit codes: 0 success, 1 usage error, 2 verification failure.
All randomized commands take --seed (fixed default) and SUBLORENTZ_THREADS
caps worker threads in the verification sweeps.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import heisenberg as heis
from . import quaternion as quat
from . import verify
from .causal import classify_coefficients
from .groups import Group
from .reachable import random_control_curve

USAGE_EXIT = 1
VERIFY_EXIT = 2

REPORT_SCHEMA = {
    "type": "object",
    "required": ["suite", "passed", "checks"],
    "properties": {
        "suite": {"type": "string"},
        "seed": {"type": ["integer", "null"]},
        "n": {"type": ["integer", "null"]},
        "passed": {"type": "boolean"},
        "notes": {"type": "array", "items": {"type": "string"}},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "value", "passed"],
                "properties": {
                    "name": {"type": "string"},
                    "value": {"type": "number"},
                    "tolerance": {"type": ["number", "null"]},
                    "passed": {"type": "boolean"},
                },
            },
        },
    },
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _group(tag: str) -> Group:
    return Group.HEISENBERG_L if tag == "heis" else Group.QUATERNION_H


def _build_parser() -> _Parser:
    p = _Parser(prog="sublorentz")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="causal class of a vector or target")
    c.add_argument("--group", choices=["heis", "quat"], required=True)
    c.add_argument("--vector", type=float, nargs="+",
                   help="frame coefficients (2 for heis, 4 for quat)")
    c.add_argument("--target", type=float, nargs=3, metavar=("X", "Y", "Z"),
                   help="endpoint to classify for geodesic connection (heis)")
    c.add_argument("--out", default=None)

    g = sub.add_parser("geodesic", help="closed-form geodesics as CSV")
    gsub = g.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    gs = gsub.add_parser("shoot")
    gs.add_argument("--group", choices=["heis", "quat"], default="heis")
    gs.add_argument("--v0", type=float, nargs="+", required=True)
    gs.add_argument("--theta", type=float, nargs="+", required=True)
    gs.add_argument("--t-max", type=float, default=1.0)
    gs.add_argument("--samples", type=int, default=201)
    gs.add_argument("--out", default=None)
    gc = gsub.add_parser("connect")
    gc.add_argument("--target", type=float, nargs=3, required=True, metavar=("X", "Y", "Z"))
    gc.add_argument("--samples", type=int, default=201)
    gc.add_argument("--out", default=None)

    v = sub.add_parser("verify", help="run a verification suite, report JSON")
    v.add_argument("suite", choices=["mu", "appendix", "identities", "inclusion", "crosscheck"])
    v.add_argument("--n", type=int, default=None)
    v.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    v.add_argument("--out", default=None)

    d = sub.add_parser("plotdata", help="figure-ready CSV samples")
    d.add_argument("figure", choices=["timelike-geodesic", "mu-curve", "reachable-region"])
    d.add_argument("--points", type=int, default=1000)
    d.add_argument("--target", type=float, nargs=3, default=[2.0, 1.0, 0.1])
    d.add_argument("--out", default=None)

    r = sub.add_parser("reachable-sample", help="endpoints of random causal curves")
    r.add_argument("--n", type=int, default=200)
    r.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    r.add_argument("--mode", choices=["timelike", "nonspacelike"], default="timelike")
    r.add_argument("--out", default=None)
    return p


def _cmd_classify(args) -> int:
    group = _group(args.group)
    if (args.vector is None) == (args.target is None):
        print("classify: provide exactly one of --vector or --target", file=sys.stderr)
        return USAGE_EXIT
    if args.vector is not None:
        want = 2 if group is Group.HEISENBERG_L else 4
        if len(args.vector) != want:
            print(f"classify: --vector needs {want} entries for {args.group}",
                  file=sys.stderr)
            return USAGE_EXIT
        result = str(classify_coefficients(args.vector))
        payload = {"input": {"group": args.group, "vector": args.vector}, "result": result}
    else:
        if group is not Group.HEISENBERG_L:
            print("classify: --target is only defined for --group heis", file=sys.stderr)
            return USAGE_EXIT
        cls = heis.classify_target(heis.HeisTarget(*args.target))
        payload = {"input": {"group": args.group, "target": args.target},
                   "result": cls.value}
    _write(json.dumps(payload, sort_keys=True) + "\n", args.out)
    return 0


def _cmd_geodesic(args) -> int:
    buf = io.StringIO()
    if args.mode == "shoot":
        group = _group(args.group)
        ts = np.linspace(0.0, args.t_max, args.samples)
        if group is Group.HEISENBERG_L:
            if len(args.v0) != 2 or len(args.theta) != 1:
                print("geodesic shoot: heis needs --v0 VX VY and --theta TH",
                      file=sys.stderr)
                return USAGE_EXIT
            path = heis.sample_path(heis.HeisIVP(args.v0[0], args.v0[1], args.theta[0]), ts)
        else:
            if len(args.v0) != 4 or len(args.theta) != 3:
                print("geodesic shoot: quat needs 4 --v0 and 3 --theta entries",
                      file=sys.stderr)
                return USAGE_EXIT
            cf = quat.closed_form(quat.QuatIVP(tuple(args.v0), tuple(args.theta)))
            xs = quat.shoot_x(cf, ts)
            zs = quat.shoot_z(cf, ts)
            vels = quat.shoot_xdot(cf, ts)
            from .paths import build_path

            path = build_path(Group.QUATERNION_H, ts, xs, zs, vels)
    else:
        try:
            _, path = heis.connect(heis.HeisTarget(*args.target), samples=args.samples)
        except heis.UnreachableTargetError as exc:
            print(f"geodesic connect: {exc}", file=sys.stderr)
            return USAGE_EXIT
    path.write_csv(buf)
    _write(buf.getvalue(), args.out)
    return 0


_SUITES = {
    "mu": (verify.ratio_solver_report, 1000),
    "appendix": (verify.appendix_report, 1000),
    "identities": (verify.identity_report, 300),
    "inclusion": (verify.inclusion_report, 1000),
    "crosscheck": (verify.crosscheck_report, 100),
}


def _cmd_verify(args) -> int:
    fn, default_n = _SUITES[args.suite]
    n = args.n if args.n is not None else default_n
    report = fn(n=n, seed=args.seed)
    _write(json.dumps(report, sort_keys=True, indent=1) + "\n", args.out)
    return 0 if report["passed"] else VERIFY_EXIT


def _cmd_plotdata(args) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if args.figure == "mu-curve":
        w.writerow(["tau", "ratio"])
        for t in np.linspace(-5.0, 5.0, args.points):
            w.writerow([repr(float(t)), repr(heis.endpoint_ratio(t))])
    elif args.figure == "timelike-geodesic":
        try:
            _, path = heis.connect(heis.HeisTarget(*args.target),
                                   samples=max(2, args.points))
        except heis.UnreachableTargetError as exc:
            print(f"plotdata: {exc}", file=sys.stderr)
            return USAGE_EXIT
        path.write_csv(buf)
    else:  # reachable-region: the surface 4|z| = x^2 - y^2, x > 0
        w.writerow(["x", "y", "z"])
        side = max(2, int(np.sqrt(args.points / 2)))
        for x in np.linspace(0.1, 2.0, side):
            for y in np.linspace(-x, x, side):
                zb = (x * x - y * y) / 4.0
                for z in (zb, -zb):
                    w.writerow([repr(float(x)), repr(float(y)), repr(float(z))])
    _write(buf.getvalue(), args.out)
    return 0


def _cmd_reachable_sample(args) -> int:
    seeds = np.random.SeedSequence(args.seed).spawn(args.n)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x1", "x2", "x3", "x4", "z1", "z2", "z3", "eta0", "in_cone"])
    from .reachable import Region

    cone = Region.cone(0.0)
    for s in seeds:
        curve = random_control_curve(np.random.default_rng(s), mode=args.mode)
        end = curve.endpoint()
        x = end.x_vec
        eta0 = float(-x[0] ** 2 + x[1:] @ x[1:])
        w.writerow([repr(v) for v in end.coords()]
                   + [repr(eta0), str(cone.contains(end)).lower()])
    _write(buf.getvalue(), args.out)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_EXIT
    try:
        if args.command == "classify":
            return _cmd_classify(args)
        if args.command == "geodesic":
            return _cmd_geodesic(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "plotdata":
            return _cmd_plotdata(args)
        return _cmd_reachable_sample(args)
    except (ValueError, OSError) as exc:
        print(f"sublorentz: error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
