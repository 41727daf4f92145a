"""Steiner symmetrization about the real axis.

The result is stored as a profile ``x -> half_length(x)``: each vertical
slice of the input is replaced by the centred interval of the same
length, so symmetry and vertical convexity hold by construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .geometry import Disc, Domain, Polygon, parse_domain

DEFAULT_GRID_N = 4096


@dataclass(frozen=True)
class SymmetrizedRegion:
    """Union of segments ``{x_k} x (-h_k, h_k)`` with linear interpolation in between.

    ``x_grid`` is nondecreasing; a repeated abscissa carries the left and
    right limits of a jump in the profile. The end values are the inward
    one-sided limits.
    """

    x_grid: np.ndarray
    half_lengths: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x_grid, float)
        h = np.asarray(self.half_lengths, float)
        if x.shape != h.shape or x.ndim != 1 or x.size < 2:
            raise ValueError("x_grid and half_lengths must be 1-d arrays of equal length >= 2")
        if np.any(np.diff(x) < 0):
            raise ValueError("x_grid must be nondecreasing")
        if np.any(h < 0):
            raise ValueError("half lengths must be nonnegative")
        for arr in (x, h):
            arr.setflags(write=False)
        object.__setattr__(self, "x_grid", x)
        object.__setattr__(self, "half_lengths", h)

    def half_length_at(self, x):
        """Profile value; at a jump the right limit is returned."""
        xs = self.x_grid
        x = np.asarray(x, float)
        idx = np.searchsorted(xs, x, side="right") - 1
        idx = np.clip(idx, 0, len(xs) - 2)
        x0, x1 = xs[idx], xs[idx + 1]
        h0, h1 = self.half_lengths[idx], self.half_lengths[idx + 1]
        t = np.where(x1 > x0, (x - x0) / np.where(x1 > x0, x1 - x0, 1.0), 0.0)
        out = np.where((x < xs[0]) | (x > xs[-1]), 0.0, h0 + t * (h1 - h0))
        return float(out) if out.ndim == 0 else out

    def boundary(self) -> np.ndarray:
        """Closed counterclockwise boundary polyline (zero-height ends collapsed)."""
        x, h = self.x_grid, self.half_lengths
        lower = np.column_stack([x, -h])
        upper = np.column_stack([x[::-1], h[::-1]])
        pts = np.vstack([lower, upper])
        keep = np.any(pts != np.roll(pts, 1, axis=0), axis=1)
        return pts[keep]


def _augment_grid(uniform: np.ndarray, vertex_x: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Exact vertex abscissae plus the uniform points not within ``rtol * span`` of one."""
    vx = np.unique(vertex_x)
    span = max(float(vx[-1] - vx[0]), 1e-300)
    j = np.clip(np.searchsorted(vx, uniform), 1, len(vx) - 1)
    gap = np.minimum(np.abs(uniform - vx[j - 1]), np.abs(uniform - vx[j]))
    return np.union1d(vx, uniform[gap > rtol * span])


def steiner_symmetrize(domain: Domain, grid_n: int = DEFAULT_GRID_N) -> SymmetrizedRegion:
    """Slice profile on ``grid_n`` uniform abscissae (plus every polygon vertex abscissa)."""
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    xmin, xmax = domain.bounds[:2]
    grid = np.linspace(xmin, xmax, grid_n)
    if isinstance(domain, Disc):
        return SymmetrizedRegion(grid, 0.5 * domain.slice_measure(grid))
    if not isinstance(domain, Polygon):
        raise TypeError(f"unsupported domain {domain!r}")

    grid = _augment_grid(grid, domain.vertices[:, 0])
    left, right = domain.slice_limits(grid)
    left[0] = right[0]
    right[-1] = left[-1]
    xs, hs = [], []
    tol = 1e-12 * max(1.0, float(np.max(np.abs(right))))
    for x, lv, rv in zip(grid, left, right):
        if abs(lv - rv) > tol:
            xs.extend((x, x))
            hs.extend((lv, rv))
        else:
            xs.append(x)
            hs.append(rv)
    return SymmetrizedRegion(np.array(xs), 0.5 * np.clip(np.array(hs), 0.0, None))


def region_area(region: SymmetrizedRegion) -> float:
    x, h = region.x_grid, region.half_lengths
    return float(np.sum(np.diff(x) * (h[1:] + h[:-1])))


def region_perimeter(region: SymmetrizedRegion) -> float:
    x, h = region.x_grid, region.half_lengths
    profile = np.sum(np.hypot(np.diff(x), np.diff(h)))
    return float(2.0 * profile + 2.0 * h[0] + 2.0 * h[-1])


def region_to_domain(region: SymmetrizedRegion) -> Polygon:
    if not np.any(region.half_lengths > 0):
        raise ValueError("region has empty interior")
    pts = region.boundary()
    # vertex abscissae one ulp apart leave sub-ulp edges; they carry no area
    tol = 1e-12 * float(np.ptp(pts, axis=0).max())
    keep = [0]
    for k in range(1, len(pts)):
        if np.max(np.abs(pts[k] - pts[keep[-1]])) > tol:
            keep.append(k)
    if len(keep) > 1 and np.max(np.abs(pts[keep[-1]] - pts[0])) <= tol:
        keep.pop()
    try:
        return Polygon(pts[keep])
    except ValueError as exc:
        raise ValueError(f"cannot turn region into a domain: {exc}") from exc


class SteinerSymmetrizer(BaseEstimator):
    """Estimator wrapper: ``fit(domain)`` stores ``region_``; ``transform`` returns a polygon."""

    def __init__(self, grid_n=DEFAULT_GRID_N):
        self.grid_n = grid_n

    def fit(self, X, y=None):
        domain = parse_domain(X)
        self.region_ = steiner_symmetrize(domain, self.grid_n)
        self.area_ = region_area(self.region_)
        self.perimeter_ = region_perimeter(self.region_)
        self.input_area_ = domain.area
        self.input_perimeter_ = domain.perimeter
        return self

    def transform(self, X=None):
        check_is_fitted(self, "region_")
        return region_to_domain(self.region_)

    def fit_transform(self, X, y=None):
        return self.fit(X).transform()
