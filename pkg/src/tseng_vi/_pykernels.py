"""Pure-numpy fallback for the compiled kernels in ``_kernels.pyx``."""

import numpy as np

# rows of the N x N scan evaluated per block, keeps memory bounded
_SCAN_BLOCK = 512


def dist(a, b):
    d = a - b
    return float(np.sqrt(np.dot(d, d)))


def project_box(v, lo, hi):
    return np.minimum(np.maximum(v, lo), hi)


def project_ball(v, center, radius):
    d = v - center
    r = float(np.sqrt(np.dot(d, d)))
    if r <= radius:
        return v.copy()
    return center + d * (radius / r)


def project_halfspace(v, normal, offset):
    t = float(np.dot(normal, v)) - offset
    if t <= 0.0:
        return v.copy()
    return v - (t / float(np.dot(normal, normal))) * normal


def project_simplex(v, scale):
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    cand = (css - scale) / np.arange(1, v.size + 1)
    rho = np.nonzero(u - cand > 0.0)[0][-1]
    return np.maximum(v - cand[rho], 0.0)


def project_halfspaces(v, normals, offsets, max_sweeps, tol):
    m, n = normals.shape
    nn = np.einsum("ij,ij->i", normals, normals)
    norms = np.sqrt(nn)
    x = v.copy()
    p = np.zeros((m, n))
    scale = max(1.0, float(np.linalg.norm(v)))
    for sweep in range(1, max_sweeps + 1):
        prev = x.copy()
        for i in range(m):
            t = x + p[i]
            excess = float(np.dot(normals[i], t)) - offsets[i]
            if excess > 0.0:
                t = t - (excess / nn[i]) * normals[i]
            p[i] = x + p[i] - t
            x = t
        change = float(np.linalg.norm(x - prev))
        worst = max(0.0, float(np.max((normals @ x - offsets) / norms)))
        if change <= tol * scale and worst <= tol * scale:
            return x, sweep, True
    return x, max_sweeps, False


def vi_scan(points, values, dual, tol):
    npts = points.shape[0]
    mask = np.ones(npts, dtype=bool)
    if dual:
        # <g_j, z_j> - <g_j, x_i>
        own = np.einsum("ij,ij->i", values, points)
        for start in range(0, npts, _SCAN_BLOCK):
            blk = points[start:start + _SCAN_BLOCK]
            s = own[None, :] - blk @ values.T
            mask[start:start + _SCAN_BLOCK] = s.min(axis=1) >= -tol
    else:
        # <g_i, z_j> - <g_i, x_i>
        for start in range(0, npts, _SCAN_BLOCK):
            g = values[start:start + _SCAN_BLOCK]
            x = points[start:start + _SCAN_BLOCK]
            s = g @ points.T - np.einsum("ij,ij->i", g, x)[:, None]
            mask[start:start + _SCAN_BLOCK] = s.min(axis=1) >= -tol
    return mask
