"""Gross map of an exit law and the Brownian symmetrization built on it.

For a centred law with quantile ``G`` the even function
``phi(theta) = G(|theta| / pi)`` has the cosine series
``sum_n a_n cos(n theta)`` with ``a_n = (2/pi) int_0^pi phi cos(n theta)``;
the map ``psi(z) = sum_n a_n z^n`` is univalent on the unit disc and its
image is the symmetrized domain. Its boundary is ``psi(e^{i theta})`` and
its area is ``pi * sum_n n a_n^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .distributions import Distribution, Empirical, empirical_from_samples
from .geometry import Domain, Polygon, find_self_intersection
from .sampler import SamplerConfig, sample_disc_exit_exact, sample_exit_em, sample_exit_wos

DEFAULT_N = 401
DEFAULT_M = 4096

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class FourierMap:
    """Real coefficients ``a_1 .. a_N`` of ``psi``; ``a_0`` is zero by centring."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, float).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def truncation_order(self) -> int:
        return self.coeffs.size

    @property
    def orders(self) -> np.ndarray:
        return np.arange(1, self.coeffs.size + 1)

    def fejer(self) -> "FourierMap":
        """Cesaro-weighted copy with weights ``1 - n / (N + 1)``."""
        n = self.orders
        return FourierMap(self.coeffs * (1.0 - n / (self.truncation_order + 1)))

    def __call__(self, z):
        """Evaluate ``psi`` at complex points with ``|z| <= 1``."""
        z = np.asarray(z, complex)
        return np.polynomial.polynomial.polyval(z, np.concatenate([[0.0], self.coeffs]))


@dataclass(frozen=True)
class BoundaryCurve:
    thetas: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        if len(self.thetas) != len(self.points):
            raise ValueError("thetas and points must have the same length")

    def __len__(self):
        return len(self.thetas)

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]


def _step_coefficients(dist: Empirical, N: int, block: int = 8) -> np.ndarray:
    # phi equals the k-th order statistic on (pi (k-1)/n, pi k/n]; summing by parts
    # a_m = -(2 / (pi m)) sum_k sin(m pi k / n) (x_{k+1} - x_k)
    xs = dist.sorted_samples
    n = xs.size
    jumps = np.diff(xs)
    k = np.flatnonzero(jumps) + 1
    dx = jumps[k - 1]
    frac = np.pi * k / n
    out = np.empty(N)
    for lo in range(1, N + 1, block):
        m = np.arange(lo, min(lo + block, N + 1))
        out[m - 1] = -(2.0 / (np.pi * m)) * (np.sin(np.outer(m, frac)) @ dx)
    return out


def _gl_nodes(panels: int):
    edges = np.linspace(0.0, np.pi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    theta = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return theta, weights


def _quadrature_coefficients(dist: Distribution, N: int, panels: int, block: int = 32) -> np.ndarray:
    theta, w = _gl_nodes(panels)
    fw = np.asarray(dist.phi(theta)) * w
    out = np.empty(N)
    for lo in range(1, N + 1, block):
        n = np.arange(lo, min(lo + block, N + 1))
        out[n - 1] = (2.0 / np.pi) * (np.cos(np.outer(n, theta)) @ fw)
    return out


def fourier_coefficients(
    dist: Distribution,
    N: int = DEFAULT_N,
    panels: int = 512,
    tol: float = 1e-8,
    max_panels: int = 2**14,
) -> FourierMap:
    """Cosine coefficients of ``phi``.

    Empirical laws are integrated exactly (``phi`` is a step function).
    Other laws use composite 16-point Gauss-Legendre on uniform panels of
    ``(0, pi)``, doubled until the first 64 coefficients move by less
    than ``tol``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if isinstance(dist, Empirical):
        return FourierMap(_step_coefficients(dist, N))
    p = panels
    while p < N:
        p *= 2
    check = min(N, 64)
    prev = _quadrature_coefficients(dist, N, p)
    while True:
        if 2 * p > max_panels:
            raise RuntimeError(
                f"coefficient quadrature for {dist!r} did not settle to {tol:g} "
                f"with {p} panels (N={N})"
            )
        p *= 2
        cur = _quadrature_coefficients(dist, N, p)
        change = np.max(np.abs(cur[:check] - prev[:check]))
        if change < tol:
            return FourierMap(cur)
        prev = cur


def theta_grid(M: int) -> np.ndarray:
    """``M`` uniform angles in ``(-pi, pi)``, mirror-symmetric about 0."""
    return (2.0 * np.arange(M) + 1.0 - M) * (np.pi / M)


def evaluate_boundary(fmap: FourierMap, M: int = DEFAULT_M) -> BoundaryCurve:
    if M < 8:
        raise ValueError("M must be at least 8")
    theta = theta_grid(M)
    arg = np.outer(theta, fmap.orders)
    pts = np.column_stack([np.cos(arg) @ fmap.coeffs, np.sin(arg) @ fmap.coeffs])
    return BoundaryCurve(theta, pts)


def area(fmap: FourierMap) -> float:
    return float(np.pi * np.sum(fmap.orders * fmap.coeffs ** 2))


def curve_length(curve: BoundaryCurve) -> float:
    p = curve.points
    return float(np.sum(np.hypot(*(np.roll(p, -1, axis=0) - p).T)))


def check_simple_curve(curve: BoundaryCurve):
    """``(True, None)`` when no two non-adjacent polyline edges meet, else ``(False, (i, j))``."""
    if len(curve) < 8:
        raise ValueError("need at least 8 curve points")
    pair = find_self_intersection(curve.points)
    return pair is None, pair


def detect_vertical_segments(curve: BoundaryCurve, x_tol: float = 0.02, min_len: float = 0.1):
    """Runs of consecutive points whose abscissae stay within ``x_tol`` of a common value.

    The curve is treated as closed. Returns ``(x, length)`` pairs, where
    ``x`` is the run's mid abscissa and ``length`` its vertical extent,
    for runs at least ``min_len`` tall.
    """
    x = curve.x
    y = curve.y
    m = len(x)
    if m == 0:
        return []
    start = int(np.argmax(np.abs(x - np.roll(x, 1))))
    order = np.roll(np.arange(m), -start)
    xs, ys = x[order], y[order]
    runs = []
    i = 0
    while i < m:
        lo = hi = xs[i]
        j = i + 1
        while j < m and max(hi, xs[j]) - min(lo, xs[j]) <= 2.0 * x_tol:
            lo = min(lo, xs[j])
            hi = max(hi, xs[j])
            j += 1
        extent = float(ys[i:j].max() - ys[i:j].min())
        if j - i > 1 and extent >= min_len:
            runs.append((0.5 * float(lo + hi), extent))
        i = j
    return runs


def curve_to_domain(curve: BoundaryCurve) -> Polygon:
    """Polygon through the curve points (consecutive duplicates removed)."""
    p = curve.points
    keep = np.any(p != np.roll(p, 1, axis=0), axis=1)
    return Polygon(p[keep])


def exit_samples(domain: Domain, cfg: SamplerConfig, method: str = "wos"):
    if method == "wos":
        return sample_exit_wos(domain, cfg)
    if method == "em":
        return sample_exit_em(domain, cfg)
    if method == "disc-exact":
        if not hasattr(domain, "radius"):
            raise ValueError("disc-exact sampling needs a disc domain")
        return sample_disc_exit_exact(domain.center, domain.radius, cfg)
    raise ValueError(f"unknown sampling method {method!r}")


def brownian_symmetrize(
    domain: Domain,
    cfg: SamplerConfig,
    N: int = DEFAULT_N,
    M: int = DEFAULT_M,
    method: str = "wos",
):
    """Sample exits, centre the empirical law, expand ``phi`` and trace ``psi(e^{i theta})``."""
    samples = exit_samples(domain, cfg, method)
    fmap = fourier_coefficients(empirical_from_samples(samples.x), N)
    return fmap, evaluate_boundary(fmap, M)


class GrossMap(TransformerMixin, BaseEstimator):
    """Gross map fitted to a sample of real exit positions.

    ``fit`` accepts a 1-d array of abscissae or an ``(n, 2)`` array of exit
    points (only the first column is used). ``transform`` maps angles to
    boundary points ``psi(e^{i theta})``.

    Parameters
    ----------
    n_terms : int
        Truncation order of the series.
    n_boundary : int
        Number of angles in ``boundary_``.
    fejer : bool
        Apply Cesaro weights to the coefficients after fitting.
    """

    def __init__(self, n_terms=DEFAULT_N, n_boundary=DEFAULT_M, fejer=False):
        self.n_terms = n_terms
        self.n_boundary = n_boundary
        self.fejer = fejer

    def _finish(self, dist):
        fmap = fourier_coefficients(dist, self.n_terms)
        if self.fejer:
            fmap = fmap.fejer()
        self.distribution_ = dist
        self.map_ = fmap
        self.coef_ = fmap.coeffs
        self.area_ = area(fmap)
        self.boundary_ = evaluate_boundary(fmap, self.n_boundary)
        return self

    def fit(self, X, y=None):
        X = check_array(X, ensure_2d=False)
        xs = X[:, 0] if X.ndim == 2 else X
        return self._finish(empirical_from_samples(xs))

    def fit_distribution(self, dist: Distribution):
        """Fit directly from an analytic law, bypassing sampling."""
        return self._finish(dist)

    def transform(self, X):
        check_is_fitted(self, "coef_")
        theta = check_array(X, ensure_2d=False).ravel()
        arg = np.outer(theta, self.map_.orders)
        return np.column_stack([np.cos(arg) @ self.coef_, np.sin(arg) @ self.coef_])


class BrownianSymmetrizer(BaseEstimator):
    """Brownian symmetrization of a domain: exit sampling followed by a Gross map.

    ``fit`` takes a :class:`~brownsym.geometry.Domain` (or anything
    :func:`~brownsym.geometry.parse_domain` accepts).
    """

    def __init__(self, n_samples=100_000, epsilon=1e-4, dt=1e-5, seed=0, workers=1,
                 n_terms=DEFAULT_N, n_boundary=DEFAULT_M, method="wos", fejer=False):
        self.n_samples = n_samples
        self.epsilon = epsilon
        self.dt = dt
        self.seed = seed
        self.workers = workers
        self.n_terms = n_terms
        self.n_boundary = n_boundary
        self.method = method
        self.fejer = fejer

    def sampler_config(self) -> SamplerConfig:
        return SamplerConfig(self.n_samples, self.epsilon, self.dt, self.seed, self.workers)

    def fit(self, X, y=None):
        from .geometry import parse_domain

        domain = parse_domain(X)
        self.samples_ = exit_samples(domain, self.sampler_config(), self.method)
        self.gross_ = GrossMap(self.n_terms, self.n_boundary, self.fejer).fit(self.samples_.x)
        self.map_ = self.gross_.map_
        self.curve_ = self.gross_.boundary_
        self.area_ = self.gross_.area_
        return self

    def transform(self, X=None):
        """Symmetrized domain as a polygon through the boundary curve."""
        check_is_fitted(self, "curve_")
        return curve_to_domain(self.curve_)


def area_lower_bound(fmap: FourierMap) -> float:
    """``pi * a_1^2``: area of the disc of radius ``|a_1|``."""
    return math.pi * float(fmap.coeffs[0]) ** 2
