"""Command line front end: ``brownsym {sample,symmetrize,eigen,verify,replay}``.

Every run writes one manifest (command line, parameters, seed, version
and SHA-256 of each output file) into ``--out-dir``.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .distributions import empirical_from_samples, parse_distribution
from .eigen import dirichlet_eigen
from .geometry import Polygon, parse_domain
from .gross import (
    DEFAULT_M,
    DEFAULT_N,
    BoundaryCurve,
    area,
    area_lower_bound,
    check_simple_curve,
    curve_length,
    curve_to_domain,
    detect_vertical_segments,
    evaluate_boundary,
    exit_samples,
    fourier_coefficients,
)
from .sampler import SamplerConfig
from .steiner import DEFAULT_GRID_N, region_area, region_perimeter, steiner_symmetrize
from .verify import run_suite

log = logging.getLogger("brownsym")

REPORT_SCHEMA = 1


class Run:
    """Collects output files of one invocation and writes its manifest."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.out_dir = args.out_dir
        os.makedirs(self.out_dir, exist_ok=True)
        self.outputs = []

    def path(self, name):
        return name if os.path.isabs(name) else os.path.join(self.out_dir, name)

    def register(self, name):
        self.outputs.append(name)

    def write_csv(self, name, header, columns):
        data = np.column_stack(columns)
        np.savetxt(self.path(name), data, fmt="%.17g", delimiter=",", header=header, comments="")
        self.register(name)

    def write_json(self, name, obj):
        with open(self.path(name), "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.register(name)

    def write_text(self, name, text):
        with open(self.path(name), "w") as fh:
            fh.write(text)
        self.register(name)

    def finish(self):
        params = {k: v for k, v in vars(self.args).items() if k != "func"}
        manifest = {
            "schema": REPORT_SCHEMA,
            "command": self.args.command,
            "argv": self.argv,
            "parameters": params,
            "seed": self.args.seed,
            "version": __version__,
            "outputs": {name: sha256(self.path(name)) for name in self.outputs},
        }
        with open(self.path(self.args.manifest), "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return manifest


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def curve_svg(points, stroke="#1f4e9c") -> str:
    """Static polyline; y is flipped so the plot reads like the plane."""
    pts = np.asarray(points, float)
    xmin, ymin = pts.min(axis=0)
    xmax, ymax = pts.max(axis=0)
    span = max(xmax - xmin, ymax - ymin, 1e-12)
    pad = 0.05 * span
    vb = (xmin - pad, -ymax - pad, xmax - xmin + 2 * pad, ymax - ymin + 2 * pad)
    body = " ".join(f"{x:.6f},{-y:.6f}" for x, y in pts)
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{vb[0]:.6f} {vb[1]:.6f} {vb[2]:.6f} {vb[3]:.6f}" width="480" height="480">\n'
        f'<polygon points="{body}" fill="none" stroke="{stroke}" '
        f'stroke-width="{span / 400:.6f}"/>\n</svg>\n'
    )


def _config(args) -> SamplerConfig:
    return SamplerConfig(
        n_samples=args.n, epsilon=args.epsilon, dt=args.dt, seed=args.seed, workers=args.workers
    )


def cmd_sample(args, run: Run) -> int:
    domain = parse_domain(args.domain)
    samples = exit_samples(domain, _config(args), args.method)
    cols = [samples.positions[:, 0], samples.positions[:, 1]]
    header = "x,y"
    if samples.times is not None:
        cols.append(samples.times)
        header = "x,y,t"
    run.write_csv(args.out, header, cols)
    log.info("wrote %d exit samples to %s", len(samples), run.path(args.out))
    return 0


def _brownian(args, run: Run) -> dict:
    domain = None
    if args.dist:
        dist = parse_distribution(json.loads(args.dist))
    else:
        domain = parse_domain(args.domain)
        dist = empirical_from_samples(exit_samples(domain, _config(args), args.method).x)
    fmap = fourier_coefficients(dist, args.N)
    if args.cesaro:
        fmap = fmap.fejer()
    curve = evaluate_boundary(fmap, args.M)
    simple, pair = check_simple_curve(curve)
    report = {
        "schema": REPORT_SCHEMA,
        "mode": "brownian",
        "area": area(fmap),
        "area_lower_bound": area_lower_bound(fmap),
        "curve_length": curve_length(curve),
        "vertical_segments": [
            {"x": x, "length": ln}
            for x, ln in detect_vertical_segments(curve, args.x_tol, args.min_len)
        ],
        "simple": bool(simple),
        "first_violation": list(pair) if pair else None,
        "N": args.N,
        "M": args.M,
        "cesaro": bool(args.cesaro),
    }
    if domain is not None:
        report["input_area"] = domain.area
        report["input_perimeter"] = domain.perimeter
    if args.out_coeffs:
        run.write_csv(args.out_coeffs, "n,phi_hat", [fmap.orders, fmap.coeffs])
    if args.out_curve:
        run.write_csv(args.out_curve, "theta,x,y", [curve.thetas, curve.x, curve.y])
    if args.out_svg:
        run.write_text(args.out_svg, curve_svg(curve.points))
    return report


def _steiner(args, run: Run) -> dict:
    domain = parse_domain(args.domain)
    region = steiner_symmetrize(domain, args.grid_n)
    report = {
        "schema": REPORT_SCHEMA,
        "mode": "steiner",
        "area": region_area(region),
        "perimeter": region_perimeter(region),
        "input_area": domain.area,
        "input_perimeter": domain.perimeter,
        "grid_n": args.grid_n,
    }
    boundary = region.boundary()
    if args.out_curve:
        run.write_csv(args.out_curve, "x,y", [boundary[:, 0], boundary[:, 1]])
    if args.out_svg:
        run.write_text(args.out_svg, curve_svg(boundary, stroke="#2a8a3a"))
    return report


def cmd_symmetrize(args, run: Run) -> int:
    report = _brownian(args, run) if args.mode == "brownian" else _steiner(args, run)
    run.write_json(args.report, report)
    print(json.dumps({k: report[k] for k in report if k != "vertical_segments"}, sort_keys=True))
    return 0


def read_curve_csv(path) -> BoundaryCurve:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    cols = {name: data[:, i] for i, name in enumerate(header)}
    pts = np.column_stack([cols["x"], cols["y"]])
    thetas = cols.get("theta", np.linspace(-math.pi, math.pi, len(pts), endpoint=False))
    return BoundaryCurve(thetas, pts)


def cmd_eigen(args, run: Run) -> int:
    if args.curve:
        curve = read_curve_csv(args.curve)
        simple, pair = check_simple_curve(curve)
        if not simple:
            raise ValueError(f"curve is not simple (edges {pair[0]} and {pair[1]} meet)")
        domain: Polygon = curve_to_domain(curve)
    else:
        domain = parse_domain(args.domain)
    res = dirichlet_eigen(domain, args.h)
    report = {
        "schema": REPORT_SCHEMA,
        "eigenvalue": res.eigenvalue,
        "rate": res.rate,
        "iterations": res.iterations,
        "residual": res.residual,
        "h": args.h,
        "interior_nodes": int(res.field.mask.sum()),
    }
    run.write_json(args.report, report)
    print(json.dumps(report, sort_keys=True))
    return 0


def cmd_verify(args, run: Run) -> int:
    res = run_suite(args.suite, _config(args), domain=args.domain, k=args.kappa)
    for check in res.checks:
        print(check.line())
    print(f"suite {res.suite}: {'PASS' if res.passed else 'FAIL'}")
    run.write_json(args.report, {"schema": REPORT_SCHEMA, **res.to_json()})
    return 0 if res.passed else 1


def cmd_replay(args, run: Run) -> int:
    with open(args.manifest_file) as fh:
        manifest = json.load(fh)
    argv = list(manifest["argv"])
    workdir = args.into or tempfile.mkdtemp(prefix="brownsym-replay-")
    status = main(argv + ["--out-dir", workdir], _nested=True)
    mismatched = []
    for name, digest in manifest["outputs"].items():
        path = name if os.path.isabs(name) else os.path.join(workdir, name)
        if sha256(path) != digest:
            mismatched.append(name)
    for name in mismatched:
        print(f"[FAIL] {name} differs from the manifest digest")
    print(f"replay: {'PASS' if not mismatched and status == 0 else 'FAIL'} ({len(manifest['outputs'])} files)")
    return 0 if not mismatched and status == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--workers", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out-dir", default=argparse.SUPPRESS)

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--n", type=int, default=100_000, help="number of walks")
    sampling.add_argument("--epsilon", type=float, default=1e-4, help="walk-on-spheres shell")
    sampling.add_argument("--dt", type=float, default=1e-5, help="Euler-Maruyama step")
    sampling.add_argument("--method", choices=["wos", "em", "disc-exact"], default="wos")

    p = argparse.ArgumentParser(prog="brownsym", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--manifest", default="manifest.json", help="manifest file name inside --out-dir")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", parents=[common, sampling], help="draw exit positions")
    s.add_argument("--domain", required=True)
    s.add_argument("--out", default="samples.csv")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("symmetrize", parents=[common, sampling], help="Brownian or Steiner symmetrization")
    s.add_argument("--mode", choices=["brownian", "steiner"], required=True)
    s.add_argument("--domain")
    s.add_argument("--dist", help="analytic law as JSON; bypasses sampling")
    s.add_argument("--N", type=int, default=DEFAULT_N)
    s.add_argument("--M", type=int, default=DEFAULT_M)
    s.add_argument("--cesaro", action="store_true", help="apply Fejer weights to the coefficients")
    s.add_argument("--grid-n", type=int, default=DEFAULT_GRID_N)
    s.add_argument("--x-tol", type=float, default=0.005, help="vertical-run abscissa tolerance")
    s.add_argument("--min-len", type=float, default=0.02, help="shortest reported vertical run")
    s.add_argument("--out-coeffs")
    s.add_argument("--out-curve")
    s.add_argument("--out-svg")
    s.add_argument("--report", default="report.json")
    s.set_defaults(func=cmd_symmetrize)

    s = sub.add_parser("eigen", parents=[common], help="principal Dirichlet eigenvalue")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--domain")
    g.add_argument("--curve", help="closed curve CSV with x,y columns")
    s.add_argument("--h", type=float, default=1 / 128)
    s.add_argument("--report", default="eigen.json")
    s.set_defaults(func=cmd_eigen)

    s = sub.add_parser("verify", parents=[common, sampling], help="run a verification suite")
    s.add_argument("--suite", choices=["idempotence", "thm3", "kappa"], required=True)
    s.add_argument("--domain")
    s.add_argument("--kappa", type=float, default=0.5)
    s.add_argument("--report", default="verify.json")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("replay", parents=[common], help="re-run a manifest and compare output digests")
    s.add_argument("manifest_file")
    s.add_argument("--into", help="directory for the replayed outputs (default: a fresh temp dir)")
    s.set_defaults(func=cmd_replay)
    return p


def main(argv=None, _nested=False) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if not _nested:
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
    if args.command == "symmetrize":
        if args.mode == "brownian" and not (args.domain or args.dist):
            parser.error("symmetrize --mode brownian needs --domain or --dist")
        if args.mode == "steiner" and not args.domain:
            parser.error("symmetrize --mode steiner needs --domain")
    if args.command == "replay":
        return args.func(args, None)
    run = Run(args, argv)
    try:
        status = args.func(args, run)
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        print(f"brownsym: error: {exc}", file=sys.stderr)
        return 2
    run.finish()
    return status


if __name__ == "__main__":
    sys.exit(main())
