"""Verification suites comparing the two symmetrizations on fixtures.

Each suite returns a :class:`SuiteResult`; a suite passes iff every
check passes. Conjecture-style quantities go into ``info`` and are never
asserted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import KappaDisc
from .geometry import Domain, hausdorff_distance, parse_domain, thm3_domain
from .gross import (
    area,
    brownian_symmetrize,
    curve_to_domain,
    detect_vertical_segments,
    evaluate_boundary,
    fourier_coefficients,
)
from .sampler import SamplerConfig, sample_exit_wos
from .steiner import region_area, region_to_domain, steiner_symmetrize

ONE_PASS_TOL = 0.02
RECTANGLE_TOL = 0.05
SEPARATION = 0.1
ATOM_FLOOR = 0.05
THM3_X_TOL = 0.005
THM3_MIN_LEN = 0.02
KAPPA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))
REFERENCE_KAPPA_AREA = 0.6


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    relation: str
    passed: bool

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: {self.value:.10g} {self.relation} {self.threshold:.6g}"


@dataclass
class SuiteResult:
    suite: str
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, value, threshold, relation):
        ok = {"<": value < threshold, ">": value > threshold, "<=": value <= threshold}[relation]
        self.checks.append(Check(name, float(value), float(threshold), relation, bool(ok)))

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [c.__dict__ for c in self.checks],
            "info": self.info,
        }


def idempotence(domain: Domain, cfg: SamplerConfig, N: int = 64, M: int = 2048,
                grid_n: int = 4096) -> SuiteResult:
    res = SuiteResult("idempotence")
    _, b_curve = brownian_symmetrize(domain, cfg, N, M)
    b_domain = curve_to_domain(b_curve)

    sb = steiner_symmetrize(b_domain, grid_n)
    res.add("hausdorff(S(B(U)), B(U))", hausdorff_distance(sb.boundary(), b_curve.points), ONE_PASS_TOL, "<")

    _, bb_curve = brownian_symmetrize(b_domain, cfg, N, M)
    res.add("hausdorff(B(B(U)), B(U))", hausdorff_distance(bb_curve.points, b_curve.points),
            2 * ONE_PASS_TOL, "<")

    s = steiner_symmetrize(domain, grid_n)
    _, bs_curve = brownian_symmetrize(region_to_domain(s), cfg, N, M)
    res.add("hausdorff(B(S(U)), S(U))", hausdorff_distance(bs_curve.points, s.boundary()), RECTANGLE_TOL, "<")

    ss = steiner_symmetrize(region_to_domain(s), grid_n)
    shared = np.intersect1d(s.x_grid, ss.x_grid)
    gap = float(np.max(np.abs(s.half_length_at(shared) - ss.half_length_at(shared))))
    res.add("max |S(S(U)) - S(U)| on shared grid", gap, 1e-9, "<")
    return res


def thm3(cfg: SamplerConfig, N: int = 401, M: int = 4096) -> SuiteResult:
    res = SuiteResult("thm3")
    U = thm3_domain()
    xs = sample_exit_wos(U, cfg).x
    for c in (-1.0, 0.0, 1.0):
        frac = float(np.mean(np.abs(xs - c) < 2 * cfg.epsilon))
        res.add(f"exit mass near x={c:+g}", frac, ATOM_FLOOR, ">")

    fmap, curve = brownian_symmetrize(U, cfg, N, M)
    runs = detect_vertical_segments(curve, THM3_X_TOL, THM3_MIN_LEN)
    res.info["vertical_segments"] = [{"x": x, "length": ln} for x, ln in runs]
    for c in (-1.0, 0.0, 1.0):
        miss = min((abs(x - c) for x, _ in runs), default=math.inf)
        res.add(f"vertical run offset from x={c:+g}", miss, 0.01, "<")

    s = steiner_symmetrize(U)
    res.info["steiner_area"] = region_area(s)
    res.info["brownian_area"] = area(fmap)
    res.add("hausdorff(B(U), S(U))", hausdorff_distance(curve.points, s.boundary()), SEPARATION, ">")
    return res


def kappa_table(kappas=KAPPA_GRID, N: int = 401) -> list[dict]:
    rows = []
    for k in kappas:
        fmap = fourier_coefficients(KappaDisc(k), N)
        a = area(fmap)
        rows.append({"kappa": k, "area": a, "area_over_pi": a / math.pi})
    return rows


def kappa(k: float = 0.5, N: int = 401, M: int = 4096) -> SuiteResult:
    res = SuiteResult("kappa")
    fmap = fourier_coefficients(KappaDisc(k), N)
    curve = evaluate_boundary(fmap, M)
    radius = np.hypot(curve.x, curve.y)
    res.add("area(B(U))", area(fmap), math.pi, "<")
    res.add("max |curve point|", float(radius.max()), 1.0, "<")
    res.info["min_radial_margin"] = float(1.0 - radius.max())
    table = kappa_table(N=N)
    res.info["kappa_grid"] = table
    near = [r["kappa"] for r in table if abs(r["area"] - REFERENCE_KAPPA_AREA) < 0.05]
    res.info["kappa_with_area_near_0.6"] = near
    return res


def run_suite(name: str, cfg: SamplerConfig, domain=None, k: float = 0.5) -> SuiteResult:
    if name == "idempotence":
        return idempotence(parse_domain(domain or "builtin:unit-disc"), cfg)
    if name == "thm3":
        return thm3(cfg)
    if name == "kappa":
        return kappa(k)
    raise ValueError(f"unknown suite {name!r}; expected idempotence, thm3 or kappa")
