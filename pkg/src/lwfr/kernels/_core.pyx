# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel core.

Mirrors `lwfr.kernels.fallback` function by function; see that module for
semantics. Loops are fused per state so each batch is traversed once.
"""

from libc.math cimport fabs, sqrt

import numpy as np

SCAN_STEPS = 64
BISECT_ITERS = 45


def tm_primitives(double[:, ::1] u):
    cdef Py_ssize_t n = u.shape[1], i
    out_arr = np.empty((5, n))
    cdef double[:, ::1] out = out_arr
    cdef double rho, v1, v2
    for i in range(n):
        rho = u[0, i]
        v1 = u[1, i] / rho
        v2 = u[2, i] / rho
        out[0, i] = v1
        out[1, i] = v2
        out[2, i] = 2.0 * u[3, i] - u[1, i] * v1
        out[3, i] = 2.0 * u[4, i] - u[1, i] * v2
        out[4, i] = 2.0 * u[5, i] - u[2, i] * v2
    return out_arr


cdef inline void _flux_at(const double* u, int axis, double* f) noexcept nogil:
    cdef double rho = u[0]
    cdef double v1 = u[1] / rho
    cdef double v2 = u[2] / rho
    cdef double p11 = 2.0 * u[3] - u[1] * v1
    cdef double p12 = 2.0 * u[4] - u[1] * v2
    cdef double p22 = 2.0 * u[5] - u[2] * v2
    if axis == 0:
        f[0] = u[1]
        f[1] = p11 + u[1] * v1
        f[2] = p12 + u[1] * v2
        f[3] = (u[3] + p11) * v1
        f[4] = u[4] * v1 + 0.5 * (p11 * v2 + p12 * v1)
        f[5] = u[5] * v1 + p12 * v2
    else:
        f[0] = u[2]
        f[1] = p12 + u[1] * v2
        f[2] = p22 + u[2] * v2
        f[3] = u[3] * v2 + p12 * v1
        f[4] = u[4] * v2 + 0.5 * (p12 * v2 + p22 * v1)
        f[5] = (u[5] + p22) * v2


def tm_flux(double[:, ::1] u, int axis):
    cdef Py_ssize_t n = u.shape[1], i, c
    out_arr = np.empty((6, n))
    cdef double[:, ::1] f = out_arr
    cdef double uloc[6]
    cdef double floc[6]
    for i in range(n):
        for c in range(6):
            uloc[c] = u[c, i]
        _flux_at(uloc, axis, floc)
        for c in range(6):
            f[c, i] = floc[c]
    return out_arr


cdef inline double _speed_at(const double* u, int axis) noexcept nogil:
    cdef double rho = u[0]
    cdef double vn, pnn
    if axis == 0:
        vn = u[1] / rho
        pnn = 2.0 * u[3] - u[1] * vn
    else:
        vn = u[2] / rho
        pnn = 2.0 * u[5] - u[2] * vn
    return fabs(vn) + sqrt(3.0 * pnn / rho)


def tm_wave_speed(double[:, ::1] u, int axis):
    cdef Py_ssize_t n = u.shape[1], i, c
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double uloc[6]
    for i in range(n):
        for c in range(6):
            uloc[c] = u[c, i]
        out[i] = _speed_at(uloc, axis)
    return out_arr


def tm_constraints(double[:, ::1] u):
    cdef Py_ssize_t n = u.shape[1], i
    out_arr = np.empty((3, n))
    cdef double[:, ::1] out = out_arr
    cdef double rho, v1, v2, p11, p12, p22
    for i in range(n):
        rho = u[0, i]
        v1 = u[1, i] / rho
        v2 = u[2, i] / rho
        p11 = 2.0 * u[3, i] - u[1, i] * v1
        p12 = 2.0 * u[4, i] - u[1, i] * v2
        p22 = 2.0 * u[5, i] - u[2, i] * v2
        out[0, i] = rho
        out[1, i] = p11 + p22
        out[2, i] = p11 * p22 - p12 * p12
    return out_arr


def tm_rusanov(double[:, ::1] ul, double[:, ::1] ur, int axis):
    cdef Py_ssize_t n = ul.shape[1], i, c
    out_arr = np.empty((6, n))
    cdef double[:, ::1] out = out_arr
    cdef double uloc_l[6]
    cdef double uloc_r[6]
    cdef double fl[6]
    cdef double fr[6]
    cdef double lam, sl, sr
    for i in range(n):
        for c in range(6):
            uloc_l[c] = ul[c, i]
            uloc_r[c] = ur[c, i]
        sl = _speed_at(uloc_l, axis)
        sr = _speed_at(uloc_r, axis)
        lam = sl if sl > sr else sr
        _flux_at(uloc_l, axis, fl)
        _flux_at(uloc_r, axis, fr)
        for c in range(6):
            out[c, i] = 0.5 * (fl[c] + fr[c]) - 0.5 * lam * (uloc_r[c] - uloc_l[c])
    return out_arr


cdef inline double _seg_det(double[:, ::1] ulow, double[:, ::1] uhigh,
                            Py_ssize_t i, double th) noexcept nogil:
    cdef double omt = 1.0 - th
    cdef double u0 = th * uhigh[0, i] + omt * ulow[0, i]
    cdef double u1 = th * uhigh[1, i] + omt * ulow[1, i]
    cdef double u2 = th * uhigh[2, i] + omt * ulow[2, i]
    cdef double u3 = th * uhigh[3, i] + omt * ulow[3, i]
    cdef double u4 = th * uhigh[4, i] + omt * ulow[4, i]
    cdef double u5 = th * uhigh[5, i] + omt * ulow[5, i]
    cdef double p11 = 2.0 * u3 - u1 * u1 / u0
    cdef double p12 = 2.0 * u4 - u1 * u2 / u0
    cdef double p22 = 2.0 * u5 - u2 * u2 / u0
    return p11 * p22 - p12 * p12


def tm_theta_det_pair(double[:, ::1] ulow_a, double[:, ::1] uhigh_a,
                      double[::1] eps_a, act_a,
                      double[:, ::1] ulow_b, double[:, ::1] uhigh_b,
                      double[::1] eps_b, act_b):
    cdef Py_ssize_t n = ulow_a.shape[1], i
    cdef const unsigned char[::1] aa = np.ascontiguousarray(act_a, dtype=np.uint8)
    cdef const unsigned char[::1] ab = np.ascontiguousarray(act_b, dtype=np.uint8)
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double lo, hi, th, mid, step
    cdef int k, it, scan = SCAN_STEPS, iters = BISECT_ITERS
    cdef bint good, found
    step = 1.0 / scan
    for i in range(n):
        good = True
        if aa[i]:
            good = _seg_det(ulow_a, uhigh_a, i, 1.0) >= eps_a[i]
        if good and ab[i]:
            good = _seg_det(ulow_b, uhigh_b, i, 1.0) >= eps_b[i]
        if good:
            out[i] = 1.0
            continue
        found = False
        lo = 0.0
        hi = step
        for k in range(1, scan + 1):
            th = 1.0 - k * step
            good = True
            if aa[i]:
                good = _seg_det(ulow_a, uhigh_a, i, th) >= eps_a[i]
            if good and ab[i]:
                good = _seg_det(ulow_b, uhigh_b, i, th) >= eps_b[i]
            if good:
                lo = th
                hi = th + step
                found = True
                break
        if not found:
            out[i] = 0.0
            continue
        for it in range(iters):
            mid = 0.5 * (lo + hi)
            good = True
            if aa[i]:
                good = _seg_det(ulow_a, uhigh_a, i, mid) >= eps_a[i]
            if good and ab[i]:
                good = _seg_det(ulow_b, uhigh_b, i, mid) >= eps_b[i]
            if good:
                lo = mid
            else:
                hi = mid
        out[i] = lo
    return out_arr
