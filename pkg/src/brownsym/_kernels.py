"""Compiled inner loops shared by :mod:`geometry` and :mod:`sampler`.

Polygons are passed as edge arrays ``ax, ay, bx, by`` plus a uniform
bucket grid (CSR layout) so that nearest-edge queries stay cheap for
polygons with thousands of edges.
"""
import math

import numba
import numpy as np

_NB = dict(nopython=True, nogil=True, cache=True)


@numba.jit(**_NB)
def segment_nearest(px, py, ax, ay, bx, by):
    dx = bx - ax
    dy = by - ay
    ll = dx * dx + dy * dy
    t = 0.0
    if ll > 0.0:
        t = ((px - ax) * dx + (py - ay) * dy) / ll
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    qx = ax + t * dx
    qy = ay + t * dy
    if dx == 0.0:
        qx = ax
    if dy == 0.0:
        qy = ay
    ex = px - qx
    ey = py - qy
    return ex * ex + ey * ey, qx, qy


@numba.jit(**_NB)
def on_segment(px, py, ax, ay, bx, by):
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    if cross != 0.0:
        return False
    return (min(ax, bx) <= px <= max(ax, bx)) and (min(ay, by) <= py <= max(ay, by))


@numba.jit(**_NB)
def polygon_contains(px, py, ax, ay, bx, by):
    """Even-odd rule; points on an edge are outside."""
    inside = False
    for k in range(ax.shape[0]):
        if on_segment(px, py, ax[k], ay[k], bx[k], by[k]):
            return False
        y0 = ay[k]
        y1 = by[k]
        if (y0 > py) != (y1 > py):
            xc = ax[k] + (py - y0) * (bx[k] - ax[k]) / (y1 - y0)
            if px < xc:
                inside = not inside
    return inside


@numba.jit(**_NB)
def polygon_contains_many(pts, ax, ay, bx, by):
    out = np.empty(pts.shape[0], dtype=np.bool_)
    for i in range(pts.shape[0]):
        out[i] = polygon_contains(pts[i, 0], pts[i, 1], ax, ay, bx, by)
    return out


@numba.jit(**_NB)
def grid_nearest(px, py, ax, ay, bx, by, x0, y0, cs, nx, ny, cstart, cedges):
    """Exact nearest boundary point via ring search over the bucket grid."""
    ci = int(math.floor((px - x0) / cs))
    cj = int(math.floor((py - y0) / cs))
    ci = min(max(ci, 0), nx - 1)
    cj = min(max(cj, 0), ny - 1)
    best = np.inf
    bqx = px
    bqy = py
    rmax = max(nx, ny)
    for r in range(rmax + 1):
        for i in range(ci - r, ci + r + 1):
            if i < 0 or i >= nx:
                continue
            for j in range(cj - r, cj + r + 1):
                if j < 0 or j >= ny:
                    continue
                if r > 0 and i != ci - r and i != ci + r and j != cj - r and j != cj + r:
                    continue
                c = i * ny + j
                for m in range(cstart[c], cstart[c + 1]):
                    e = cedges[m]
                    d2, qx, qy = segment_nearest(px, py, ax[e], ay[e], bx[e], by[e])
                    if d2 < best:
                        best = d2
                        bqx = qx
                        bqy = qy
        if best < np.inf and math.sqrt(best) <= r * cs:
            break
    # hypot, not sqrt(best): squared distances underflow for points within ~1e-154 of an edge
    return math.hypot(px - bqx, py - bqy), bqx, bqy


@numba.jit(**_NB)
def grid_nearest_many(pts, ax, ay, bx, by, x0, y0, cs, nx, ny, cstart, cedges):
    d = np.empty(pts.shape[0])
    q = np.empty((pts.shape[0], 2))
    for i in range(pts.shape[0]):
        d[i], q[i, 0], q[i, 1] = grid_nearest(
            pts[i, 0], pts[i, 1], ax, ay, bx, by, x0, y0, cs, nx, ny, cstart, cedges
        )
    return d, q


# ---------------------------------------------------------------------------
# walk on spheres

@numba.jit(**_NB)
def wos_disc(rng, n, cx, cy, r, eps, max_steps):
    out = np.empty((n, 2))
    for i in range(n):
        x = 0.0
        y = 0.0
        steps = 0
        while True:
            dx = x - cx
            dy = y - cy
            rho = math.sqrt(dx * dx + dy * dy)
            d = r - rho
            if d < eps:
                if rho > 0.0:
                    x = cx + r * dx / rho
                    y = cy + r * dy / rho
                break
            if steps >= max_steps:
                return out, i
            a = 2.0 * math.pi * rng.random()
            x += d * math.cos(a)
            y += d * math.sin(a)
            steps += 1
        out[i, 0] = x
        out[i, 1] = y
    return out, -1


@numba.jit(**_NB)
def wos_polygon(rng, n, ax, ay, bx, by, x0, y0, cs, nx, ny, cstart, cedges, eps, max_steps):
    out = np.empty((n, 2))
    for i in range(n):
        x = 0.0
        y = 0.0
        steps = 0
        while True:
            d, qx, qy = grid_nearest(x, y, ax, ay, bx, by, x0, y0, cs, nx, ny, cstart, cedges)
            if d < eps:
                x = qx
                y = qy
                break
            if steps >= max_steps:
                return out, i
            a = 2.0 * math.pi * rng.random()
            x += d * math.cos(a)
            y += d * math.sin(a)
            steps += 1
        out[i, 0] = x
        out[i, 1] = y
    return out, -1


# ---------------------------------------------------------------------------
# Euler-Maruyama

@numba.jit(**_NB)
def em_disc(rng, n, cx, cy, r, dt, max_steps):
    out = np.empty((n, 3))
    s = math.sqrt(dt)
    r2 = r * r
    for i in range(n):
        x = 0.0
        y = 0.0
        k = 0
        while (x - cx) * (x - cx) + (y - cy) * (y - cy) < r2:
            if k >= max_steps:
                return out, i
            x += s * rng.standard_normal()
            y += s * rng.standard_normal()
            k += 1
        dx = x - cx
        dy = y - cy
        rho = math.sqrt(dx * dx + dy * dy)
        out[i, 0] = cx + r * dx / rho
        out[i, 1] = cy + r * dy / rho
        out[i, 2] = k * dt
    return out, -1


@numba.jit(**_NB)
def em_polygon(rng, n, ax, ay, bx, by, x0, y0, cs, nx, ny, cstart, cedges, dt, max_steps):
    out = np.empty((n, 3))
    s = math.sqrt(dt)
    for i in range(n):
        x = 0.0
        y = 0.0
        k = 0
        while polygon_contains(x, y, ax, ay, bx, by):
            if k >= max_steps:
                return out, i
            x += s * rng.standard_normal()
            y += s * rng.standard_normal()
            k += 1
        _, qx, qy = grid_nearest(x, y, ax, ay, bx, by, x0, y0, cs, nx, ny, cstart, cedges)
        out[i, 0] = qx
        out[i, 1] = qy
        out[i, 2] = k * dt
    return out, -1
