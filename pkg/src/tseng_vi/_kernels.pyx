# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Every function here has a numpy twin in :mod:`tseng_vi._pykernels` with the
same signature; :mod:`tseng_vi._backend` picks one at import time.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def dist(const double[::1] a, const double[::1] b):
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double s = 0.0, d
    for i in range(n):
        d = a[i] - b[i]
        s += d * d
    return sqrt(s)


def project_box(const double[::1] v, const double[::1] lo, const double[::1] hi):
    cdef Py_ssize_t i, n = v.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] z = out
    cdef double t
    for i in range(n):
        t = v[i]
        if t < lo[i]:
            t = lo[i]
        elif t > hi[i]:
            t = hi[i]
        z[i] = t
    return out


def project_ball(const double[::1] v, const double[::1] center, double radius):
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double s = 0.0, d, r
    for i in range(n):
        d = v[i] - center[i]
        s += d * d
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] z = out
    r = sqrt(s)
    if r <= radius:
        for i in range(n):
            z[i] = v[i]
    else:
        for i in range(n):
            z[i] = center[i] + (v[i] - center[i]) * (radius / r)
    return out


cdef inline double _halfspace_inplace(double[::1] z, const double[:] normal,
                                      double offset, double nn) noexcept nogil:
    cdef Py_ssize_t i, n = z.shape[0]
    cdef double s = 0.0, t
    for i in range(n):
        s += normal[i] * z[i]
    t = s - offset
    if t > 0.0:
        t = t / nn
        for i in range(n):
            z[i] -= t * normal[i]
    return t if t > 0.0 else 0.0


def project_halfspace(const double[::1] v, const double[::1] normal, double offset):
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double nn = 0.0
    for i in range(n):
        nn += normal[i] * normal[i]
    out = np.array(v, dtype=np.float64, copy=True)
    cdef double[::1] z = out
    _halfspace_inplace(z, normal, offset, nn)
    return out


def project_simplex(const double[::1] v, double scale):
    cdef Py_ssize_t i, n = v.shape[0]
    srt = np.sort(np.asarray(v))[::-1].copy()
    cdef double[::1] u = srt
    cdef double css = 0.0, theta = 0.0, cand
    for i in range(n):
        css += u[i]
        cand = (css - scale) / (i + 1)
        if u[i] - cand > 0.0:
            theta = cand
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] z = out
    for i in range(n):
        z[i] = v[i] - theta if v[i] - theta > 0.0 else 0.0
    return out


def project_halfspaces(const double[::1] v, const double[:, ::1] normals,
                       const double[::1] offsets, long max_sweeps, double tol):
    """Dykstra's cyclic projection onto an intersection of halfspaces.

    Returns ``(z, sweeps, converged)``.
    """
    cdef Py_ssize_t m = normals.shape[0], n = v.shape[0]
    cdef Py_ssize_t i, j
    cdef long sweep
    cdef double change, d, viol, worst, scale
    nn_arr = np.einsum("ij,ij->i", np.asarray(normals), np.asarray(normals))
    cdef double[::1] nn = nn_arr
    out = np.array(v, dtype=np.float64, copy=True)
    cdef double[::1] x = out
    incr_arr = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] p = incr_arr
    prev_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] prev = prev_arr
    tmp_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] t = tmp_arr

    scale = 0.0
    for j in range(n):
        scale += v[j] * v[j]
    scale = 1.0 if sqrt(scale) < 1.0 else sqrt(scale)

    for sweep in range(1, max_sweeps + 1):
        for j in range(n):
            prev[j] = x[j]
        for i in range(m):
            for j in range(n):
                t[j] = x[j] + p[i, j]
            _halfspace_inplace(t, normals[i], offsets[i], nn[i])
            for j in range(n):
                p[i, j] = x[j] + p[i, j] - t[j]
                x[j] = t[j]
        change = 0.0
        for j in range(n):
            d = x[j] - prev[j]
            change += d * d
        worst = 0.0
        for i in range(m):
            viol = -offsets[i]
            for j in range(n):
                viol += normals[i, j] * x[j]
            viol /= sqrt(nn[i])
            if viol > worst:
                worst = viol
        if sqrt(change) <= tol * scale and worst <= tol * scale:
            return out, sweep, True
    return out, max_sweeps, False


def vi_scan(const double[:, ::1] points, const double[:, ::1] values,
            bint dual, double tol):
    """Flag grid points passing the (dual) variational inequality on the grid.

    Primal: ``<values[i], points[j] - points[i]> >= -tol`` for every j.
    Dual:   ``<values[j], points[j] - points[i]> >= -tol`` for every j.
    """
    cdef Py_ssize_t npts = points.shape[0], d = points.shape[1]
    cdef Py_ssize_t i, j, c
    cdef double s
    mask_arr = np.ones(npts, dtype=np.uint8)
    cdef unsigned char[::1] mask = mask_arr
    with nogil:
        for i in range(npts):
            for j in range(npts):
                s = 0.0
                if dual:
                    for c in range(d):
                        s += values[j, c] * (points[j, c] - points[i, c])
                else:
                    for c in range(d):
                        s += values[i, c] * (points[j, c] - points[i, c])
                if s < -tol:
                    mask[i] = 0
                    break
    return mask_arr.view(np.bool_)
