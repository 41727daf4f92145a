"""Planar domains: simple polygons and discs.

Every domain is open (boundary points are outside) and must contain the
origin, which is where the Brownian motion is started.
"""
from __future__ import annotations

import json
import math
import os
from abc import ABC, abstractmethod
from urllib.parse import parse_qs

import numpy as np

from . import _kernels

ORIENT_RTOL = 1e-12


class Domain(ABC):
    """Bounded simply connected open region containing the origin."""

    @abstractmethod
    def contains(self, p) -> bool:
        ...

    @abstractmethod
    def contains_points(self, pts) -> np.ndarray:
        ...

    @abstractmethod
    def nearest_boundary_points(self, pts) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(distances, nearest_points)`` for an ``(n, 2)`` array."""

    @abstractmethod
    def slice_measure(self, x):
        ...

    @property
    @abstractmethod
    def area(self) -> float:
        ...

    @property
    @abstractmethod
    def perimeter(self) -> float:
        ...

    @property
    @abstractmethod
    def bounds(self) -> tuple[float, float, float, float]:
        """``(xmin, xmax, ymin, ymax)`` of the closure."""

    @abstractmethod
    def boundary_points(self, n: int) -> np.ndarray:
        """Closed boundary polyline with at least ``n`` vertices (not repeated at the end)."""

    @abstractmethod
    def to_json(self) -> dict:
        ...

    def distance_to_boundary(self, p) -> float:
        if not self.contains(p):
            raise ValueError(f"point {tuple(p)} is not interior to the domain")
        d, _ = self.nearest_boundary_points(np.asarray(p, float).reshape(1, 2))
        return float(d[0])

    def _check_origin(self):
        if not self.contains((0.0, 0.0)):
            raise ValueError("the origin must lie strictly inside the domain")


class Disc(Domain):
    def __init__(self, center=(0.0, 0.0), radius=1.0):
        cx, cy = (float(c) for c in center)
        radius = float(radius)
        if not (math.isfinite(cx) and math.isfinite(cy) and math.isfinite(radius)):
            raise ValueError("disc parameters must be finite")
        if radius <= 0:
            raise ValueError(f"disc radius must be positive, got {radius}")
        self.center = (cx, cy)
        self.radius = radius
        self._check_origin()

    def __repr__(self):
        return f"Disc(center={self.center}, radius={self.radius})"

    def contains(self, p) -> bool:
        x, y = p
        cx, cy = self.center
        return (x - cx) ** 2 + (y - cy) ** 2 < self.radius ** 2

    def contains_points(self, pts) -> np.ndarray:
        pts = np.asarray(pts, float).reshape(-1, 2)
        cx, cy = self.center
        return (pts[:, 0] - cx) ** 2 + (pts[:, 1] - cy) ** 2 < self.radius ** 2

    def nearest_boundary_points(self, pts):
        pts = np.asarray(pts, float).reshape(-1, 2)
        c = np.asarray(self.center)
        rel = pts - c
        rho = np.hypot(rel[:, 0], rel[:, 1])
        safe = np.where(rho > 0, rho, 1.0)
        dirs = np.where(rho[:, None] > 0, rel / safe[:, None], np.array([1.0, 0.0]))
        return np.abs(self.radius - rho), c + self.radius * dirs

    def slice_measure(self, x):
        x = np.asarray(x, float)
        u = self.radius ** 2 - (x - self.center[0]) ** 2
        out = 2.0 * np.sqrt(np.clip(u, 0.0, None))
        return float(out) if out.ndim == 0 else out

    @property
    def area(self) -> float:
        return math.pi * self.radius ** 2

    @property
    def perimeter(self) -> float:
        return 2.0 * math.pi * self.radius

    @property
    def bounds(self):
        cx, cy = self.center
        r = self.radius
        return (cx - r, cx + r, cy - r, cy + r)

    def boundary_points(self, n: int) -> np.ndarray:
        t = 2.0 * np.pi * np.arange(n) / n
        return np.column_stack(
            [self.center[0] + self.radius * np.cos(t), self.center[1] + self.radius * np.sin(t)]
        )

    def to_json(self) -> dict:
        return {"type": "disc", "center": list(self.center), "radius": self.radius}


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _within_box(ax, ay, bx, by, px, py):
    return (
        (np.minimum(ax, bx) <= px) & (px <= np.maximum(ax, bx))
        & (np.minimum(ay, by) <= py) & (py <= np.maximum(ay, by))
    )


def edge_grid(ax, ay, bx, by):
    """Uniform bucket grid over segment bounding boxes, in CSR layout.

    Returns ``(x0, y0, cell, nx, ny, cstart, cedges)`` as consumed by the
    nearest-edge kernels.
    """
    xmin = float(min(ax.min(), bx.min()))
    xmax = float(max(ax.max(), bx.max()))
    ymin = float(min(ay.min(), by.min()))
    ymax = float(max(ay.max(), by.max()))
    n_edges = len(ax)
    cells = int(min(max(math.ceil(math.sqrt(n_edges)), 1), 256))
    cs = max(xmax - xmin, ymax - ymin, 1e-300) / cells * (1.0 + 1e-9)
    nx = max(int(math.ceil((xmax - xmin) / cs)), 1)
    ny = max(int(math.ceil((ymax - ymin) / cs)), 1)
    i0 = np.clip(np.floor((np.minimum(ax, bx) - xmin) / cs).astype(int), 0, nx - 1)
    i1 = np.clip(np.floor((np.maximum(ax, bx) - xmin) / cs).astype(int), 0, nx - 1)
    j0 = np.clip(np.floor((np.minimum(ay, by) - ymin) / cs).astype(int), 0, ny - 1)
    j1 = np.clip(np.floor((np.maximum(ay, by) - ymin) / cs).astype(int), 0, ny - 1)
    buckets = [[] for _ in range(nx * ny)]
    for e in range(n_edges):
        for i in range(i0[e], i1[e] + 1):
            for j in range(j0[e], j1[e] + 1):
                buckets[i * ny + j].append(e)
    cstart = np.zeros(nx * ny + 1, dtype=np.int64)
    cstart[1:] = np.cumsum([len(bk) for bk in buckets])
    cedges = np.array([e for bk in buckets for e in bk], dtype=np.int64)
    return (xmin, ymin, float(cs), nx, ny, cstart, cedges)


def polyline_distance(pts, polyline) -> np.ndarray:
    """Distance from each point to the closed polyline through ``polyline``."""
    v = np.asarray(polyline, float)
    w = np.roll(v, -1, axis=0)
    edges = [np.ascontiguousarray(c) for c in (v[:, 0], v[:, 1], w[:, 0], w[:, 1])]
    pts = np.ascontiguousarray(np.asarray(pts, float).reshape(-1, 2))
    d, _ = _kernels.grid_nearest_many(pts, *edges, *edge_grid(*edges))
    return d


def densify(polyline, step: float) -> np.ndarray:
    """Insert points along each closed-polyline edge so no gap exceeds ``step``."""
    v = np.asarray(polyline, float)
    w = np.roll(v, -1, axis=0)
    k = np.maximum(np.ceil(np.hypot(*(w - v).T) / step).astype(int), 1)
    t = np.arange(k.sum()) - np.repeat(np.cumsum(k) - k, k)
    t = (t / np.repeat(k, k))[:, None]
    return np.repeat(v, k, axis=0) + t * np.repeat(w - v, k, axis=0)


def hausdorff_distance(a, b, step: float | None = None) -> float:
    """Symmetric Hausdorff distance between two closed polylines (vertex arrays)."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if step is None:
        span = max(np.ptp(a, axis=0).max(), np.ptp(b, axis=0).max())
        step = 1e-3 * span
    return float(max(polyline_distance(densify(a, step), b).max(),
                     polyline_distance(densify(b, step), a).max()))


def segments_intersect(p1, p2, p3, p4, atol=0.0):
    """Vectorised closed-segment intersection test for segments p1p2 and p3p4.

    Orientations with magnitude at most ``atol`` count as collinear, so
    nearly coincident segments are reported as overlapping.
    """
    p1, p2, p3, p4 = (np.asarray(p, float) for p in (p1, p2, p3, p4))
    d1 = _orient(p3[..., 0], p3[..., 1], p4[..., 0], p4[..., 1], p1[..., 0], p1[..., 1])
    d2 = _orient(p3[..., 0], p3[..., 1], p4[..., 0], p4[..., 1], p2[..., 0], p2[..., 1])
    d3 = _orient(p1[..., 0], p1[..., 1], p2[..., 0], p2[..., 1], p3[..., 0], p3[..., 1])
    d4 = _orient(p1[..., 0], p1[..., 1], p2[..., 0], p2[..., 1], p4[..., 0], p4[..., 1])
    s1, s2, s3, s4 = (np.where(np.abs(d) <= atol, 0.0, np.sign(d)) for d in (d1, d2, d3, d4))
    proper = (s1 * s2 < 0) & (s3 * s4 < 0)

    def touch(s, a, b, p):
        return (s == 0) & _within_box(a[..., 0], a[..., 1], b[..., 0], b[..., 1], p[..., 0], p[..., 1])

    return (
        proper
        | touch(s1, p3, p4, p1)
        | touch(s2, p3, p4, p2)
        | touch(s3, p1, p2, p3)
        | touch(s4, p1, p2, p4)
    )


def find_self_intersection(points, max_pairs=4_000_000):
    """Locate an intersection between two non-adjacent edges of a closed polyline.

    Edge ``k`` joins ``points[k]`` to ``points[(k + 1) % m]``. Candidate
    pairs come from a sweep over x-extents; returns the lexicographically
    smallest offending ``(i, j)`` with ``i < j``, or ``None``.
    """
    pts = np.asarray(points, float)
    m = len(pts)
    a = pts
    b = np.roll(pts, -1, axis=0)
    scale = max(float(np.ptp(pts[:, 0])), float(np.ptp(pts[:, 1])), 1e-300)
    atol = ORIENT_RTOL * scale * scale
    hits = []

    # adjacent edges folding back onto each other
    nxt = np.roll(np.arange(m), -1)
    u = b - a
    w = b[nxt] - a[nxt]
    cross = u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]
    dot = (u * w).sum(axis=1)
    fold = np.flatnonzero((np.abs(cross) <= atol) & (dot < 0))
    for k in fold:
        hits.append(tuple(sorted((int(k), int(nxt[k])))))

    xlo = np.minimum(a[:, 0], b[:, 0])
    xhi = np.maximum(a[:, 0], b[:, 0])
    ylo = np.minimum(a[:, 1], b[:, 1])
    yhi = np.maximum(a[:, 1], b[:, 1])
    order = np.argsort(xlo, kind="stable")
    xlo_s = xlo[order]
    ends = np.searchsorted(xlo_s, xhi[order], side="right")
    counts = np.maximum(ends - np.arange(m) - 1, 0)

    start = 0
    while start < m:
        stop = start + 1
        total = counts[start]
        while stop < m and total + counts[stop] <= max_pairs:
            total += counts[stop]
            stop += 1
        c = counts[start:stop]
        if c.sum() > 0:
            ii = np.repeat(np.arange(start, stop), c)
            offs = np.arange(c.sum()) - np.repeat(np.cumsum(c) - c, c)
            jj = ii + 1 + offs
            gi = order[ii]
            gj = order[jj]
            keep = (ylo[gi] <= yhi[gj]) & (ylo[gj] <= yhi[gi])
            diff = np.abs(gi - gj)
            keep &= (diff != 1) & (diff != m - 1)
            gi = gi[keep]
            gj = gj[keep]
            if gi.size:
                bad = segments_intersect(a[gi], b[gi], a[gj], b[gj], atol=atol)
                for i, j in zip(gi[bad], gj[bad]):
                    hits.append((int(min(i, j)), int(max(i, j))))
        start = stop
    return min(hits) if hits else None


class Polygon(Domain):
    """Simple polygon; vertices are stored counterclockwise."""

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError("vertices must be an (n, 2) array")
        if len(v) < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices must be finite")
        if np.any(np.all(v == np.roll(v, -1, axis=0), axis=1)):
            raise ValueError("consecutive vertices must differ")
        signed = 0.5 * float(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1]))
        if signed == 0.0:
            raise ValueError("polygon has zero area")
        if signed < 0:
            v = v[::-1].copy()
        bad = find_self_intersection(v)
        if bad is not None:
            raise ValueError(f"polygon is not simple: edges {bad[0]} and {bad[1]} intersect")
        v.setflags(write=False)
        self.vertices = v
        self._area = abs(signed)
        self._build_edges()
        self._check_origin()

    def __repr__(self):
        return f"Polygon({len(self.vertices)} vertices)"

    def _build_edges(self):
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        self._ax = np.ascontiguousarray(v[:, 0])
        self._ay = np.ascontiguousarray(v[:, 1])
        self._bx = np.ascontiguousarray(w[:, 0])
        self._by = np.ascontiguousarray(w[:, 1])

        self._grid = edge_grid(self._ax, self._ay, self._bx, self._by)

    @property
    def edge_arrays(self):
        return self._ax, self._ay, self._bx, self._by

    @property
    def grid(self):
        return self._grid

    def contains(self, p) -> bool:
        x, y = (float(c) for c in p)
        return bool(_kernels.polygon_contains(x, y, self._ax, self._ay, self._bx, self._by))

    def contains_points(self, pts) -> np.ndarray:
        pts = np.ascontiguousarray(np.asarray(pts, float).reshape(-1, 2))
        return _kernels.polygon_contains_many(pts, self._ax, self._ay, self._bx, self._by)

    def nearest_boundary_points(self, pts):
        pts = np.ascontiguousarray(np.asarray(pts, float).reshape(-1, 2))
        return _kernels.grid_nearest_many(pts, self._ax, self._ay, self._bx, self._by, *self._grid)

    def _signed_slice(self, x, left: bool):
        ax, bx, ay, by = self._ax, self._bx, self._ay, self._by
        lo = np.minimum(ax, bx)
        hi = np.maximum(ax, bx)
        live = ax != bx
        x = np.asarray(x, float)[..., None]
        if left:
            hit = live & (lo < x) & (x <= hi)
        else:
            hit = live & (lo <= x) & (x < hi)
        safe = np.where(live, bx - ax, 1.0)
        y = ay + (x - ax) * (by - ay) / safe
        sign = np.where(bx < ax, 1.0, -1.0)
        return np.sum(np.where(hit, sign * y, 0.0), axis=-1)

    def slice_limits(self, x):
        """One-sided limits ``(left, right)`` of the slice length at ``x``."""
        return self._signed_slice(x, left=True), self._signed_slice(x, left=False)

    def _slice_exact(self, x: float) -> float:
        ax, bx, ay, by = self._ax, self._bx, self._ay, self._by
        ys = []
        for k in range(len(ax)):
            lo, hi = min(ax[k], bx[k]), max(ax[k], bx[k])
            if not (lo <= x <= hi):
                continue
            if ax[k] == bx[k]:
                ys.extend((ay[k], by[k]))
            else:
                ys.append(ay[k] + (x - ax[k]) * (by[k] - ay[k]) / (bx[k] - ax[k]))
        ys = np.unique(ys)
        if len(ys) < 2:
            return 0.0
        mids = np.column_stack([np.full(len(ys) - 1, x), 0.5 * (ys[:-1] + ys[1:])])
        inside = self.contains_points(mids)
        return float(np.sum(np.diff(ys)[inside]))

    def slice_measure(self, x):
        xs = np.atleast_1d(np.asarray(x, float))
        out = self._signed_slice(xs, left=False)
        xmin, xmax = self.bounds[:2]
        out = np.where((xs <= xmin) | (xs >= xmax), 0.0, out)
        on_vertex = np.isin(xs, self.vertices[:, 0])
        for k in np.flatnonzero(on_vertex):
            out[k] = self._slice_exact(float(xs[k]))
        out = np.clip(out, 0.0, None)
        return float(out[0]) if np.ndim(x) == 0 else out

    @property
    def area(self) -> float:
        return self._area

    @property
    def perimeter(self) -> float:
        return float(np.sum(np.hypot(self._bx - self._ax, self._by - self._ay)))

    @property
    def bounds(self):
        v = self.vertices
        return (float(v[:, 0].min()), float(v[:, 0].max()), float(v[:, 1].min()), float(v[:, 1].max()))

    def boundary_points(self, n: int) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        lengths = np.hypot(*(w - v).T)
        per_edge = np.maximum(np.ceil(n * lengths / lengths.sum()).astype(int), 1)
        out = []
        for a, b, k in zip(v, w, per_edge):
            t = np.arange(k)[:, None] / k
            out.append(a + t * (b - a))
        return np.vstack(out)

    def to_json(self) -> dict:
        return {"type": "polygon", "vertices": self.vertices.tolist()}


def rectangle(x0, x1, y0, y1) -> Polygon:
    return Polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


def thm3_domain() -> Polygon:
    """Z-shaped counterexample: two 1 x 3/2 rectangles joined through the gate x=0, |y|<1/2."""
    return Polygon([
        (-1.0, -0.5), (0.0, -0.5), (0.0, -1.0), (1.0, -1.0),
        (1.0, 0.5), (0.0, 0.5), (0.0, 1.0), (-1.0, 1.0),
    ])


def unit_disc() -> Disc:
    return Disc((0.0, 0.0), 1.0)


def kappa_disc(kappa: float) -> Disc:
    """Unit disc centred at ``(0, -kappa)``."""
    return Disc((0.0, -float(kappa)), 1.0)


def _builtin(name: str) -> Domain:
    base, _, query = name.partition("?")
    params = {k: v[-1] for k, v in parse_qs(query).items()}
    if base == "thm3-U":
        return thm3_domain()
    if base == "unit-disc":
        return unit_disc()
    if base == "kappa-disc":
        if "kappa" not in params:
            raise ValueError("builtin:kappa-disc requires ?kappa=K")
        return kappa_disc(float(params["kappa"]))
    if base == "rectangle":
        return rectangle(-1.0, 1.0, -0.75, 0.75)
    raise ValueError(f"unknown builtin domain {base!r}")


def domain_from_json(obj: dict) -> Domain:
    kind = obj.get("type")
    if kind == "polygon":
        return Polygon(obj["vertices"])
    if kind == "disc":
        return Disc(obj["center"], obj["radius"])
    raise ValueError(f"unknown domain type {kind!r}")


def parse_domain(spec) -> Domain:
    """Accept a ``builtin:`` name, an inline JSON string, a JSON file path or a dict."""
    if isinstance(spec, Domain):
        return spec
    if isinstance(spec, dict):
        return domain_from_json(spec)
    spec = str(spec).strip()
    if spec.startswith("builtin:"):
        return _builtin(spec[len("builtin:"):])
    if spec.startswith("{"):
        return domain_from_json(json.loads(spec))
    if os.path.exists(spec):
        with open(spec) as fh:
            return domain_from_json(json.load(fh))
    raise ValueError(f"cannot interpret domain {spec!r}")
