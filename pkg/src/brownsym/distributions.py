"""Exit laws on the real line: analytic families and empirical samples.

Every law exposes its CDF ``F``, the left-continuous quantile
``G(u) = inf{x : F(x) >= u}`` and ``phi(theta) = G(|theta| / pi)``, the
even function on the circle whose cosine series defines the Gross map.
"""
from __future__ import annotations

import csv
import math
from abc import ABC, abstractmethod

import numpy as np
from scipy import integrate

KAPPA_MAX = 0.99


def _as_float(x, out):
    return float(out) if np.ndim(x) == 0 else out


class Distribution(ABC):
    has_density = False

    @abstractmethod
    def cdf(self, x):
        ...

    @abstractmethod
    def _quantile(self, u: np.ndarray) -> np.ndarray:
        ...

    @property
    @abstractmethod
    def support(self) -> tuple[float, float]:
        ...

    def quantile(self, u):
        u_arr = np.asarray(u, float)
        if np.any(~((u_arr > 0) & (u_arr < 1))):
            raise ValueError("quantile is defined for u in the open interval (0, 1)")
        uu = np.atleast_1d(u_arr).ravel()
        x = np.atleast_1d(self._quantile(uu).astype(float))
        short = np.asarray(self.cdf(x)) < uu
        if short.any():
            x[short] = self._smallest_reaching(x[short], uu[short])
        return _as_float(u, x.reshape(u_arr.shape) if u_arr.ndim else x[0])

    def _smallest_reaching(self, lo, u):
        """Smallest float ``x > lo`` with ``F(x) >= u``, given ``F(lo) < u``.

        Rounding in a closed-form quantile can leave ``F(G(u))`` just below
        ``u``; bracket by doubling steps, then bisect down to adjacent floats.
        """
        lo = lo.copy()
        hi = np.empty_like(lo)
        step = np.abs(np.spacing(lo))
        active = np.ones(lo.shape, bool)
        while active.any():
            cand = np.maximum(lo + step, np.nextafter(lo, np.inf))
            ok = np.asarray(self.cdf(cand)) >= u
            hi = np.where(active & ok, cand, hi)
            active &= ~ok
            lo = np.where(active, cand, lo)
            step = np.where(active, 2.0 * step, step)
        while True:
            gap = np.nextafter(lo, np.inf) < hi
            if not gap.any():
                return hi
            mid = np.where(gap, lo + 0.5 * (hi - lo), hi)
            mid = np.where(gap & ((mid <= lo) | (mid >= hi)), np.nextafter(lo, np.inf), mid)
            ok = np.asarray(self.cdf(mid)) >= u
            hi = np.where(gap & ok, mid, hi)
            lo = np.where(gap & ~ok, mid, lo)

    def phi(self, theta):
        th = np.asarray(theta, float)
        if np.any(th == 0) or np.any(np.abs(th) >= np.pi):
            raise ValueError("phi is defined for 0 < |theta| < pi")
        return self.quantile(np.abs(th) / np.pi)

    def density(self, x):
        raise TypeError(f"{type(self).__name__} has no density")

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.asarray(self.quantile(rng.uniform(np.nextafter(0.0, 1.0), 1.0, size=n)))

    def density_mass(self) -> float:
        """Integral of the density over the support, via x = sin t when the support is (-1, 1)."""
        lo, hi = self.support
        if (lo, hi) == (-1.0, 1.0):
            val, _ = integrate.quad(
                lambda t: float(self.density(math.sin(t))) * math.cos(t),
                -math.pi / 2, math.pi / 2, epsabs=1e-13, epsrel=1e-13, limit=200,
            )
        else:
            val, _ = integrate.quad(lambda x: float(self.density(x)), lo, hi, epsabs=1e-13, limit=200)
        return val

    def to_json(self) -> dict:
        return {"family": self.family}


class Arcsine(Distribution):
    """Law of Re of the exit point of the unit disc from its centre."""

    family = "arcsine"
    has_density = True
    support = (-1.0, 1.0)

    def cdf(self, x):
        x = np.asarray(x, float)
        out = 0.5 + np.arcsin(np.clip(x, -1.0, 1.0)) / np.pi
        return _as_float(x, out)

    def _quantile(self, u):
        return np.sin(np.pi * (u - 0.5))

    def density(self, x):
        x = np.asarray(x, float)
        if np.any(np.abs(x) >= 1):
            raise ValueError("density evaluated outside (-1, 1)")
        return _as_float(x, 1.0 / (np.pi * np.sqrt(1.0 - x * x)))


class KappaDisc(Distribution):
    """Exit law (real part) of the unit disc centred at ``(0, -kappa)``."""

    family = "kappa-disc"
    has_density = True
    support = (-1.0, 1.0)

    def __init__(self, kappa: float):
        kappa = float(kappa)
        if not (0.0 <= kappa <= KAPPA_MAX):
            raise ValueError(f"kappa must lie in [0, {KAPPA_MAX}], got {kappa}")
        self.kappa = kappa
        self.eta = (1.0 + kappa ** 2) / (1.0 - kappa ** 2)

    def __repr__(self):
        return f"KappaDisc(kappa={self.kappa})"

    def cdf(self, x):
        x = np.asarray(x, float)
        inner = np.abs(x) < 1
        safe = np.where(inner, x, 0.0)
        mid = np.arctan(self.eta * safe / np.sqrt(1.0 - safe * safe)) / np.pi + 0.5
        out = np.where(inner, mid, np.where(x >= 1, 1.0, 0.0))
        return _as_float(x, out)

    def _quantile(self, u):
        t = np.tan(np.pi * (u - 0.5)) / self.eta
        return t / np.sqrt(1.0 + t * t)

    def phi_closed_form(self, theta):
        """sign(|theta| - pi/2) * sqrt(cot^2 / (eta^2 + cot^2))."""
        th = np.abs(np.asarray(theta, float))
        cot2 = 1.0 / np.tan(th) ** 2
        return np.sign(th - np.pi / 2) * np.sqrt(cot2 / (self.eta ** 2 + cot2))

    def density(self, x):
        x = np.asarray(x, float)
        if np.any(np.abs(x) >= 1):
            raise ValueError("density evaluated outside (-1, 1)")
        k2 = self.kappa ** 2
        out = (1.0 - k2 * k2) / (np.pi * ((1.0 - k2) ** 2 + 4.0 * k2 * x * x) * np.sqrt(1.0 - x * x))
        return _as_float(x, out)

    def to_json(self):
        return {"family": self.family, "kappa": self.kappa}


class Rademacher(Distribution):
    family = "rademacher"
    support = (-1.0, 1.0)

    def cdf(self, x):
        x = np.asarray(x, float)
        out = np.where(x < -1, 0.0, np.where(x < 1, 0.5, 1.0))
        return _as_float(x, out)

    def _quantile(self, u):
        return np.where(u <= 0.5, -1.0, 1.0)


class UniformSym(Distribution):
    family = "uniform"
    has_density = True

    def __init__(self, halfwidth: float = 1.0):
        halfwidth = float(halfwidth)
        if not halfwidth > 0:
            raise ValueError("halfwidth must be positive")
        self.halfwidth = halfwidth

    def __repr__(self):
        return f"UniformSym(halfwidth={self.halfwidth})"

    @property
    def support(self):
        return (-self.halfwidth, self.halfwidth)

    def cdf(self, x):
        x = np.asarray(x, float)
        a = self.halfwidth
        return _as_float(x, np.clip((x + a) / (2 * a), 0.0, 1.0))

    def _quantile(self, u):
        return self.halfwidth * (2.0 * u - 1.0)

    def density(self, x):
        x = np.asarray(x, float)
        a = self.halfwidth
        if np.any(np.abs(x) >= a):
            raise ValueError("density evaluated outside the support")
        return _as_float(x, np.full_like(x, 1.0 / (2 * a)))

    def to_json(self):
        return {"family": self.family, "halfwidth": self.halfwidth}


class Empirical(Distribution):
    """Centred empirical law of a finite sample; ties are kept."""

    family = "empirical"

    def __init__(self, sorted_samples: np.ndarray):
        xs = np.asarray(sorted_samples, float)
        if xs.ndim != 1 or xs.size == 0:
            raise ValueError("need a non-empty 1-d sample")
        if not np.all(np.isfinite(xs)):
            raise ValueError("samples must be finite")
        if np.any(np.diff(xs) < 0):
            raise ValueError("samples must be sorted")
        xs = xs.copy()
        xs.setflags(write=False)
        self.sorted_samples = xs

    def __repr__(self):
        return f"Empirical(n={self.sorted_samples.size})"

    def __len__(self):
        return self.sorted_samples.size

    @property
    def support(self):
        return (float(self.sorted_samples[0]), float(self.sorted_samples[-1]))

    def cdf(self, x):
        x = np.asarray(x, float)
        n = self.sorted_samples.size
        out = np.searchsorted(self.sorted_samples, x, side="right") / n
        return _as_float(x, out)

    def order_index(self, u) -> np.ndarray:
        """0-based index of the ceil(u n)-th order statistic, exact in floating point."""
        u = np.asarray(u, float)
        n = self.sorted_samples.size
        k = np.ceil(u * n).astype(np.int64)
        k = np.where(k / n < u, k + 1, k)
        k = np.where((k - 1) / n >= u, k - 1, k)
        return np.clip(k, 1, n) - 1

    def _quantile(self, u):
        return self.sorted_samples[self.order_index(u)]


def empirical_from_samples(xs) -> Empirical:
    xs = np.asarray(xs, float).ravel()
    if xs.size == 0:
        raise ValueError("cannot build an empirical law from an empty sample")
    if not np.all(np.isfinite(xs)):
        raise ValueError("samples must be finite")
    centred = np.sort(xs - math.fsum(xs) / xs.size)
    return Empirical(centred)


def read_samples_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != ["x"]:
        raise ValueError(f"{path}: expected a header starting with 'x'")
    return np.array([float(r[0]) for r in rows[1:] if r], dtype=float)


def parse_distribution(obj: dict) -> Distribution:
    family = obj.get("family")
    if family == "arcsine":
        return Arcsine()
    if family == "kappa-disc":
        return KappaDisc(obj["kappa"])
    if family == "rademacher":
        return Rademacher()
    if family == "uniform":
        return UniformSym(obj.get("halfwidth", 1.0))
    if family == "empirical":
        return empirical_from_samples(read_samples_csv(obj["samples_csv"]))
    raise ValueError(f"unknown distribution family {family!r}")


def ks_distance(samples, dist: Distribution) -> float:
    """Sup-distance between the empirical CDF of ``samples`` and ``dist.cdf``.

    Exact for laws with atoms too: both one-sided limits are compared at
    every sample value (``scipy.stats.kstest`` assumes a continuous CDF).
    """
    xs = np.sort(np.asarray(samples, float).ravel())
    if xs.size == 0:
        raise ValueError("need at least one sample")
    vals = np.unique(xs)
    n = xs.size
    emp_right = np.searchsorted(xs, vals, side="right") / n
    emp_left = np.searchsorted(xs, vals, side="left") / n
    cdf_right = np.asarray(dist.cdf(vals), float)
    cdf_left = np.asarray(dist.cdf(np.nextafter(vals, -np.inf)), float)
    return float(max(np.max(np.abs(emp_right - cdf_right)), np.max(np.abs(emp_left - cdf_left))))
