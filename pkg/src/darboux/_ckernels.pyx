# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: implicit-midpoint integration and Numerov sweeps."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()

DEF OK = 0
DEF NO_CONVERGENCE = 1
DEF DOMAIN_EXIT = 2


cdef inline void _rhs(double u, double v, double pu, double pv, int code,
                      const double[:] prm, double* out) noexcept nogil:
    cdef double t = pu * pu + pv * pv
    cdef double dhu = -t / (4.0 * u * u)
    cdef double dhv = 0.0
    if code == 1:
        dhu += prm[0] * (1.0 - v * v / (4.0 * u * u)) - prm[1] / (u * u)
        dhv += prm[0] * v / (2.0 * u)
        if prm[2] != 0.0:
            dhu -= prm[2] / (u * u * v * v)
            dhv -= 2.0 * prm[2] / (u * v * v * v)
    elif code == 2:
        dhu += -prm[0] / (u * u) - prm[1] * v / (u * u) + prm[2] * (1.0 - v * v / (u * u))
        dhv += prm[1] / u + 2.0 * prm[2] * v / u
    elif code == 3:
        dhu += -prm[0] / (u * u)
    out[0] = pu / (2.0 * u)
    out[1] = pv / (2.0 * u)
    out[2] = -dhu
    out[3] = -dhv


cdef int _step(double* s, double* z, int code, const double[:] prm, double h,
               double tol, int maxiter) noexcept nogil:
    cdef double f[4]
    cdef double g[4]
    cdef double omega = 1.0, prev = INFINITY, res, scale, mu
    cdef int it, i
    _rhs(s[0], s[1], s[2], s[3], code, prm, f)
    for i in range(4):
        z[i] = s[i] + h * f[i]
    for it in range(maxiter):
        mu = 0.5 * (s[0] + z[0])
        if not mu > 0.0:
            return DOMAIN_EXIT
        _rhs(mu, 0.5 * (s[1] + z[1]), 0.5 * (s[2] + z[2]), 0.5 * (s[3] + z[3]), code, prm, f)
        res = 0.0
        scale = 1.0
        for i in range(4):
            g[i] = s[i] + h * f[i]
            if fabs(g[i] - z[i]) > res:
                res = fabs(g[i] - z[i])
            if fabs(g[i]) > scale:
                scale = fabs(g[i])
        if res > prev:
            omega *= 0.5
        prev = res
        for i in range(4):
            z[i] = z[i] + omega * (g[i] - z[i])
        if res <= tol * scale:
            if not z[0] > 0.0:
                return DOMAIN_EXIT
            return OK
    return NO_CONVERGENCE


def midpoint_step(y, int code, prm, double h, double tol, int maxiter):
    cdef double s[4]
    cdef double z[4]
    cdef double[:] p = np.ascontiguousarray(prm, dtype=float)
    for i in range(4):
        s[i] = y[i]
    status = _step(s, z, code, p, h, tol, maxiter)
    return np.array([z[0], z[1], z[2], z[3]]), status


def midpoint_run(y0, int code, prm, double h, int nsteps, double tol, int maxiter):
    cdef cnp.ndarray[double, ndim=2] out = np.empty((nsteps + 1, 4))
    cdef double[:] p = np.ascontiguousarray(prm, dtype=float)
    cdef double s[4]
    cdef double z[4]
    cdef int n, i, status = OK
    for i in range(4):
        s[i] = y0[i]
        out[0, i] = s[i]
    for n in range(nsteps):
        status = _step(s, z, code, p, h, tol, maxiter)
        if status != OK:
            return out[: n + 1], n, status
        for i in range(4):
            s[i] = z[i]
            out[n + 1, i] = z[i]
    return out, nsteps, OK


def numerov_shoot(q_in, double y0, double y1, double h):
    cdef const double[:] q = np.ascontiguousarray(q_in, dtype=float)
    cdef Py_ssize_t n = q.shape[0], i
    cdef double c = h * h / 12.0
    cdef double ym = y0, yc = y1, yn
    cdef long nodes = 1 if y0 * y1 < 0.0 else 0
    with nogil:
        for i in range(1, n - 1):
            yn = (2.0 * (1.0 - 5.0 * c * q[i]) * yc - (1.0 + c * q[i - 1]) * ym) / (1.0 + c * q[i + 1])
            if yn * yc < 0.0:
                nodes += 1
            ym = yc
            yc = yn
            if fabs(yc) > 1e150:
                ym *= 1e-150
                yc *= 1e-150
    return yc, ym, nodes


def numerov_sweep(q_in, double y0, double y1, double h):
    cdef const double[:] q = np.ascontiguousarray(q_in, dtype=float)
    cdef Py_ssize_t n = q.shape[0], i, j
    cdef double c = h * h / 12.0
    cdef cnp.ndarray[double, ndim=1] ya = np.empty(n)
    cdef double[:] y = ya
    cdef long nodes = 0
    y[0] = y0
    y[1] = y1
    if y0 * y1 < 0.0:
        nodes = 1
    with nogil:
        for i in range(1, n - 1):
            y[i + 1] = (2.0 * (1.0 - 5.0 * c * q[i]) * y[i] - (1.0 + c * q[i - 1]) * y[i - 1]) / (1.0 + c * q[i + 1])
            if y[i + 1] * y[i] < 0.0:
                nodes += 1
            if fabs(y[i + 1]) > 1e150:
                for j in range(i + 2):
                    y[j] *= 1e-150
    return ya, nodes
