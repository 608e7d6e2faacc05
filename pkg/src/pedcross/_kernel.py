"""Compiled move search used by the engine.

Mirrors ``engine.try_move_reference`` operation for operation; the test
suite checks the two agree. Falls back to plain Python if numba is missing.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi
WRAP = 1.5 * math.pi
DIST_TOL = 1e-9
ANGLE_TOL = 1e-12

MODE_FORWARD = 0
MODE_RIGHT = 1


@njit(cache=True)
def _push_clipped(lo, hi, los, his, n):
    for shift in (-TWO_PI, 0.0, TWO_PI):
        a = lo + shift
        b = hi + shift
        if a < -HALF_PI:
            a = -HALF_PI
        if b > HALF_PI:
            b = HALF_PI
        if a < b:
            los[n] = a
            his[n] = b
            n += 1
    return n


@njit(cache=True)
def _push_wall(ox, oy, fx, fy, dist, nx, ny, offset, los, his, n):
    u = nx * fx + ny * fy
    v = -nx * fy + ny * fx
    scale = math.hypot(u, v)
    slack = offset - (nx * ox + ny * oy)
    if scale == 0.0:
        if slack < 0:
            los[n] = -HALF_PI
            his[n] = HALF_PI
            n += 1
        return n
    k = slack / (dist * scale)
    if k >= 1.0:
        return n
    if k <= -1.0:
        los[n] = -HALF_PI
        his[n] = HALF_PI
        return n + 1
    psi = math.atan2(v, u)
    half = math.acos(k)
    return _push_clipped(psi - half, psi + half, los, his, n)


@njit(cache=True)
def _choose(los, his, n, mode):
    """Angle from the free gaps of the semicircle, or nan if none."""
    order = np.argsort(los[:n], kind="mergesort")
    # merge
    mlo = np.empty(n)
    mhi = np.empty(n)
    m = 0
    for idx in order:
        lo = los[idx]
        hi = his[idx]
        if m > 0 and lo <= mhi[m - 1]:
            if hi > mhi[m - 1]:
                mhi[m - 1] = hi
        else:
            mlo[m] = lo
            mhi[m] = hi
            m += 1
    # gaps
    glo = np.empty(m + 1)
    ghi = np.empty(m + 1)
    g = 0
    if m == 0:
        glo[0] = -HALF_PI
        ghi[0] = HALF_PI
        g = 1
    else:
        if mlo[0] > -HALF_PI:
            glo[g] = -HALF_PI
            ghi[g] = mlo[0]
            g += 1
        for j in range(m - 1):
            glo[g] = mhi[j]
            ghi[g] = mlo[j + 1]
            g += 1
        if mhi[m - 1] < HALF_PI:
            glo[g] = mhi[m - 1]
            ghi[g] = HALF_PI
            g += 1
    target = 0.0 if mode == MODE_FORWARD else -HALF_PI
    best = np.nan
    best_cost = np.inf
    for j in range(g):
        a = glo[j]
        b = ghi[j]
        if mode == MODE_RIGHT:
            if a >= 0.0:
                continue
            if b > 0.0:
                b = 0.0
        theta = min(max(target, a), b)
        cost = abs(theta - target)
        if cost < best_cost - ANGLE_TOL:
            best = theta
            best_cost = cost
        elif abs(cost - best_cost) <= ANGLE_TOL and not np.isnan(best) and theta < best:
            best = theta
    return best


@njit(cache=True)
def search(ox, oy, fx, fy, dists, radii, qx, qy, qr, active, y_lo, y_hi, mode):
    """First reduction level with an admissible destination.

    ``qx, qy, qr`` describe candidate obstacles; entries with
    ``active[j] == False`` are ignored. Returns ``(level, x, y)``;
    ``level == -1`` means blocked at every level.
    """
    nq = qx.shape[0]
    los = np.empty(3 * nq + 6)
    his = np.empty(3 * nq + 6)
    bx = np.empty(nq)
    by = np.empty(nq)
    bc = np.empty(nq)
    for lev in range(dists.shape[0]):
        dist = dists[lev]
        if dist <= 0.0:
            continue
        r = radii[lev]
        nb = 0
        for j in range(nq):
            if not active[j]:
                continue
            c = r + qr[j]
            if math.hypot(qx[j] - ox, qy[j] - oy) <= dist + c + DIST_TOL:
                bx[nb] = qx[j]
                by[nb] = qy[j]
                bc[nb] = c
                nb += 1
        if mode == MODE_FORWARD:
            sx = ox + dist * fx
            sy = oy + dist * fy
            if y_lo <= sy <= y_hi:
                ok = True
                for j in range(nb):
                    if math.hypot(sx - bx[j], sy - by[j]) < bc[j]:
                        ok = False
                        break
                if ok:
                    return lev, sx, sy
        n = 0
        n = _push_wall(ox, oy, fx, fy, dist, 0.0, 1.0, y_hi, los, his, n)
        n = _push_wall(ox, oy, fx, fy, dist, 0.0, -1.0, -y_lo, los, his, n)
        d2 = dist * dist
        for j in range(nb):
            rx = bx[j] - ox
            ry = by[j] - oy
            a = rx * fx + ry * fy
            b = ry * fx - rx * fy
            dd = math.hypot(a, b)
            c = bc[j]
            if dd <= DIST_TOL:
                if dist <= c + DIST_TOL:
                    los[n] = -HALF_PI
                    his[n] = HALF_PI
                    n += 1
                continue
            k = (d2 + dd * dd - c * c) / (2.0 * dist * dd)
            if k >= 1.0:
                continue
            if k <= -1.0:
                los[n] = -HALF_PI
                his[n] = HALF_PI
                n += 1
                continue
            phi = math.atan2(b, a)
            half = math.acos(k)
            n = _push_clipped(phi - half, phi + half, los, his, n)
        theta = _choose(los, his, n, mode)
        if np.isnan(theta):
            continue
        cs = math.cos(theta)
        sn = math.sin(theta)
        nx = ox + dist * (cs * fx - sn * fy)
        ny = oy + dist * (cs * fy + sn * fx)
        ok = True
        for j in range(nb):
            if math.hypot(nx - bx[j], ny - by[j]) < bc[j] - DIST_TOL:
                ok = False
                break
        if ok:
            return lev, nx, ny
    return -1, 0.0, 0.0
