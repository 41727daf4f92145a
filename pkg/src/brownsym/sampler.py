"""Exit positions of planar Brownian motion started at the origin.

Reproducibility: the index range ``[0, n)`` is cut into fixed chunks of
``CHUNK`` walks; chunk ``i`` draws from a Philox (counter-based) stream
keyed by ``(seed, i)`` and writes its results at its own offset, so the
output never depends on ``workers``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .geometry import Disc, Domain, Polygon

CHUNK = 4096
WOS_MAX_STEPS = 10**6
EM_MAX_STEPS = 10**8


@dataclass(frozen=True)
class SamplerConfig:
    n_samples: int = 100_000
    epsilon: float = 1e-4
    dt: float = 1e-5
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class ExitSamples:
    """Exit points, shape ``(n, 2)``, plus exit times for time-resolving samplers."""

    positions: np.ndarray
    times: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.positions)

    @property
    def x(self) -> np.ndarray:
        return self.positions[:, 0]


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))


def _run_chunks(cfg: SamplerConfig, width: int, job) -> np.ndarray:
    n = cfg.n_samples
    n_chunks = math.ceil(n / CHUNK)
    out = np.empty((n, width))

    def one(c):
        lo = c * CHUNK
        hi = min(lo + CHUNK, n)
        res, failed = job(chunk_rng(cfg.seed, c), hi - lo)
        if failed >= 0:
            raise RuntimeError(
                f"walk {lo + failed} (chunk {c}) exceeded the step cap; "
                "check that the domain is bounded and the tolerance is not tiny"
            )
        out[lo:hi] = res

    if cfg.workers == 1 or n_chunks == 1:
        for c in range(n_chunks):
            one(c)
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            list(pool.map(one, range(n_chunks)))
    return out


def _polygon_args(domain: Polygon):
    return (*domain.edge_arrays, *domain.grid)


def sample_exit_wos(domain: Domain, cfg: SamplerConfig) -> ExitSamples:
    """Walk on spheres from the origin, absorbed in the ``epsilon`` shell.

    Each jump lands uniformly on the largest circle inside the domain;
    the final point is projected onto the nearest boundary point.
    """
    if not domain.contains((0.0, 0.0)):
        raise ValueError("the origin is not interior to the domain")
    d0 = domain.distance_to_boundary((0.0, 0.0))
    if cfg.epsilon >= d0:
        raise ValueError(f"epsilon={cfg.epsilon} must be below the origin's distance to the boundary ({d0})")
    eps = cfg.epsilon
    if isinstance(domain, Disc):
        (cx, cy), r = domain.center, domain.radius
        job = lambda rng, m: _kernels.wos_disc(rng, m, cx, cy, r, eps, WOS_MAX_STEPS)  # noqa: E731
    elif isinstance(domain, Polygon):
        args = _polygon_args(domain)
        job = lambda rng, m: _kernels.wos_polygon(rng, m, *args, eps, WOS_MAX_STEPS)  # noqa: E731
    else:
        raise TypeError(f"unsupported domain {domain!r}")
    return ExitSamples(_run_chunks(cfg, 2, job))


def sample_exit_em(domain: Domain, cfg: SamplerConfig) -> ExitSamples:
    """Euler-Maruyama paths with time step ``dt`` and unit diffusivity per coordinate.

    The exit is the first step landing outside (no sub-step crossing
    correction); its position is projected onto the boundary and its
    time is ``steps * dt``.
    """
    if not domain.contains((0.0, 0.0)):
        raise ValueError("the origin is not interior to the domain")
    dt = cfg.dt
    if isinstance(domain, Disc):
        (cx, cy), r = domain.center, domain.radius
        job = lambda rng, m: _kernels.em_disc(rng, m, cx, cy, r, dt, EM_MAX_STEPS)  # noqa: E731
    elif isinstance(domain, Polygon):
        args = _polygon_args(domain)
        job = lambda rng, m: _kernels.em_polygon(rng, m, *args, dt, EM_MAX_STEPS)  # noqa: E731
    else:
        raise TypeError(f"unsupported domain {domain!r}")
    out = _run_chunks(cfg, 3, job)
    return ExitSamples(np.ascontiguousarray(out[:, :2]), np.ascontiguousarray(out[:, 2]))


def sample_disc_exit_exact(center, radius: float, cfg: SamplerConfig) -> ExitSamples:
    """Exact harmonic measure of a disc seen from the origin.

    A uniform point on the unit circle is pushed through the disc
    automorphism sending 0 to the origin's position in disc coordinates.
    """
    disc = Disc(center, radius)
    c = complex(*disc.center)
    a = -c / disc.radius

    def job(rng, m):
        w = np.exp(2j * np.pi * rng.random(m))
        z = c + disc.radius * (w + a) / (1.0 + np.conj(a) * w)
        return np.column_stack([z.real, z.imag]), -1

    return ExitSamples(_run_chunks(cfg, 2, job))
