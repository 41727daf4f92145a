"""Principal Dirichlet eigenvalue by finite differences.

Five-point Laplacian on the lattice ``h * Z^2`` restricted to nodes inside
the domain; exterior and boundary nodes are hard zeros. The smallest
eigenvalue comes from inverse power iteration with conjugate-gradient
solves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import cg

from .geometry import Domain
from .gross import BoundaryCurve, check_simple_curve, curve_to_domain

MAX_ITER = 10_000


@dataclass(frozen=True)
class GridField:
    h: float
    origin: tuple[float, float]
    mask: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class EigenResult:
    eigenvalue: float
    iterations: int
    residual: float
    field: GridField

    @property
    def rate(self) -> float:
        return 0.5 * self.eigenvalue


def _lattice(domain: Domain, h: float):
    xmin, xmax, ymin, ymax = domain.bounds
    i0, i1 = math.floor(xmin / h), math.ceil(xmax / h)
    j0, j1 = math.floor(ymin / h), math.ceil(ymax / h)
    xs = np.arange(i0, i1 + 1) * h
    ys = np.arange(j0, j1 + 1) * h
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    mask = domain.contains_points(np.column_stack([X.ravel(), Y.ravel()])).reshape(X.shape)
    return (float(xs[0]), float(ys[0])), mask


def dirichlet_laplacian(mask: np.ndarray, h: float) -> sparse.csr_matrix:
    """``-Delta_h`` on the masked nodes, zero Dirichlet data elsewhere."""
    n = int(mask.sum())
    idx = np.full((mask.shape[0] + 2, mask.shape[1] + 2), -1, dtype=np.int64)
    idx[1:-1, 1:-1][mask] = np.arange(n)
    ii, jj = np.nonzero(mask)
    ii += 1
    jj += 1
    me = idx[ii, jj]
    rows, cols = [me], [me]
    vals = [np.full(n, 4.0)]
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        nb = idx[ii + di, jj + dj]
        ok = nb >= 0
        rows.append(me[ok])
        cols.append(nb[ok])
        vals.append(-np.ones(ok.sum()))
    A = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    return (A / (h * h)).tocsr()


def dirichlet_eigen(domain: Domain, h: float, rtol: float = 1e-8, max_iter: int = MAX_ITER) -> EigenResult:
    if not h > 0:
        raise ValueError("h must be positive")
    origin, mask = _lattice(domain, h)
    n = int(mask.sum())
    if n == 0:
        raise ValueError(f"no interior lattice nodes at h={h}")
    A = dirichlet_laplacian(mask, h)
    v = np.ones(n) / math.sqrt(n)
    lam = float(v @ (A @ v))
    for it in range(1, max_iter + 1):
        w, info = cg(A, v, x0=v / lam, rtol=1e-12, atol=0.0, maxiter=10 * n)
        if info < 0:
            raise RuntimeError(f"conjugate gradient failed (info={info})")
        v = w / np.linalg.norm(w)
        new = float(v @ (A @ v))
        if abs(new - lam) < rtol * abs(new):
            lam = new
            break
        lam = new
    else:
        raise RuntimeError(f"inverse iteration did not converge in {max_iter} steps")
    residual = float(np.linalg.norm(A @ v - lam * v))
    values = np.zeros(mask.shape)
    values[mask] = v
    return EigenResult(lam, it, residual, GridField(h, origin, mask, values))


def principal_eigenvalue(domain: Domain, h: float) -> float:
    return dirichlet_eigen(domain, h).eigenvalue


def curve_eigenvalue(curve: BoundaryCurve, h: float) -> float:
    simple, pair = check_simple_curve(curve)
    if not simple:
        raise ValueError(f"curve is not simple (edges {pair[0]} and {pair[1]} meet)")
    return principal_eigenvalue(curve_to_domain(curve), h)
