# cython: language_level=3
"""Compiled kernels: Dormand-Prince stepping for the family ODEs and the
Christoffel/Ricci index contractions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, fmax, isfinite

cnp.import_array()

OMEGA_SYSTEM = 0
SECOND_ORDER_SYSTEM = 1

cdef double[7] _C = [0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0]
cdef double[7][6] _A = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40, 9.0 / 40, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45, -56.0 / 15, 32.0 / 9, 0.0, 0.0, 0.0],
    [19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0.0, 0.0],
    [9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0.0],
    [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84],
]
cdef double[7] _B5 = [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0]
cdef double[7] _B4 = [5179.0 / 57600, 0.0, 7571.0 / 16695, 393.0 / 640, -92097.0 / 339200, 187.0 / 2100, 1.0 / 40]


cdef inline void _rhs(int system, double* y, double q, double m, double rate_factor, double* out) noexcept nogil:
    cdef double beta, gamma, omega, den, bd, gd, half
    if system == 0:
        beta = y[0]
        gamma = y[1]
        omega = y[2]
        den = (q - 2.0) * omega * omega - 2.0 * q * omega + q
        out[0] = 2.0 * m * q * omega * (omega - 1.0) / den
        out[1] = m * gamma * ((q - 2.0) * omega * omega - q) / (beta * den)
        out[2] = rate_factor * m * (q + 2.0 * q * omega - (3.0 * q - 2.0) * omega * omega) / beta
    else:
        beta = y[0]
        gamma = y[1]
        bd = y[2]
        gd = y[3]
        half = 0.5 * q * m * m
        out[0] = bd
        out[1] = gd
        out[2] = ((q - 1.0) * gamma * bd * bd - q * beta * bd * gd - half * gamma) / (gamma * beta)
        out[3] = (half * gamma * gamma + (q - 2.0) * beta * gamma * bd * gd
                  - (q - 1.0) * beta * beta * gd * gd) / (gamma * beta * beta)


def family_rhs(int system, y, double q, double m, double rate_factor):
    cdef double[4] buf
    cdef double[4] out
    cdef int n = 3 if system == 0 else 4
    cdef int i
    for i in range(n):
        buf[i] = y[i]
    _rhs(system, buf, q, m, rate_factor, out)
    return np.array([out[i] for i in range(n)])


def dp54_step(int system, y, double h, double q, double m, double rate_factor, double rtol, double atol):
    cdef int n = 3 if system == 0 else 4
    cdef double[4] y0
    cdef double[4] yi
    cdef double[4] ynew
    cdef double[7][4] k
    cdef int s, j, i
    cdef double acc, e, scale, err = 0.0
    for i in range(n):
        y0[i] = y[i]
    for s in range(7):
        for i in range(n):
            acc = y0[i]
            for j in range(s):
                acc += h * _A[s][j] * k[j][i]
            yi[i] = acc
        _rhs(system, yi, q, m, rate_factor, k[s])
    for i in range(n):
        acc = y0[i]
        e = 0.0
        for s in range(7):
            acc += h * _B5[s] * k[s][i]
            e += h * (_B5[s] - _B4[s]) * k[s][i]
        ynew[i] = acc
        scale = atol + rtol * fmax(fabs(y0[i]), fabs(acc))
        if not isfinite(acc):
            err = float("inf")
        elif fabs(e) / scale > err:
            err = fabs(e) / scale
    return np.array([ynew[i] for i in range(n)]), err


def christoffel_contract(const double[:, ::1] ginv, const double[:, :, ::1] dg):
    cdef Py_ssize_t n = ginv.shape[0]
    out = np.zeros((n, n, n))
    cdef double[:, :, ::1] g = out
    cdef Py_ssize_t k, i, j, l
    cdef double acc
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = 0.0
                for l in range(n):
                    acc += ginv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                g[k, i, j] = 0.5 * acc
                g[k, j, i] = 0.5 * acc
    return out


def ricci_contract(const double[:, :, ::1] gamma, const double[:, :, :, ::1] dgamma):
    cdef Py_ssize_t n = gamma.shape[0]
    out = np.zeros((n, n))
    cdef double[:, ::1] ric = out
    cdef Py_ssize_t i, j, k, l
    cdef double acc, tr
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc += dgamma[k, k, i, j] - dgamma[i, k, k, j]
                for l in range(n):
                    acc += gamma[k, k, l] * gamma[l, i, j] - gamma[k, i, l] * gamma[l, k, j]
            ric[i, j] = acc
    return out
