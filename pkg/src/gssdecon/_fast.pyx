# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled trig-sum and moment kernels.

Same contracts as gssdecon._kernels_py; selected at import in
gssdecon._backend when this module built successfully.
"""

from libc.math cimport sin, cos

import numpy as np


def sin_sums(t, w):
    """Return (S, Q) with S_i = sum_j sin(t_i w_j), Q_i = sum_j sin^2(t_i w_j)."""
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    S = np.empty(tv.shape[0])
    Q = np.empty(tv.shape[0])
    cdef double[::1] Sv = S
    cdef double[::1] Qv = Q
    cdef Py_ssize_t i, j, nt = tv.shape[0], n = wv.shape[0]
    cdef double ti, s, acc_s, acc_q
    for i in range(nt):
        ti = tv[i]
        acc_s = 0.0
        acc_q = 0.0
        for j in range(n):
            s = sin(ti * wv[j])
            acc_s += s
            acc_q += s * s
        Sv[i] = acc_s
        Qv[i] = acc_q
    return S, Q


def cos_sin_sums(t, w):
    """Return (C, S) with C_i = sum_j cos(t_i w_j), S_i = sum_j sin(t_i w_j)."""
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    C = np.empty(tv.shape[0])
    S = np.empty(tv.shape[0])
    cdef double[::1] Cv = C
    cdef double[::1] Sv = S
    cdef Py_ssize_t i, j, nt = tv.shape[0], n = wv.shape[0]
    cdef double ti, arg, acc_c, acc_s
    for i in range(nt):
        ti = tv[i]
        acc_c = 0.0
        acc_s = 0.0
        for j in range(n):
            arg = ti * wv[j]
            acc_c += cos(arg)
            acc_s += sin(arg)
        Cv[i] = acc_c
        Sv[i] = acc_s
    return C, S


def cos_sin_transform(x, t, a, b):
    """Return g_m = sum_i [a_i cos(t_i x_m) + b_i sin(t_i x_m)]."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t m, i, nx = xv.shape[0], nt = tv.shape[0]
    cdef double xm, arg, acc
    for m in range(nx):
        xm = xv[m]
        acc = 0.0
        for i in range(nt):
            arg = tv[i] * xm
            acc += av[i] * cos(arg) + bv[i] * sin(arg)
        ov[m] = acc
    return out


def sin_transform(x, t, b):
    """Return g_m = sum_i b_i sin(t_i x_m)."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t m, i, nx = xv.shape[0], nt = tv.shape[0]
    cdef double xm, acc
    for m in range(nx):
        xm = xv[m]
        acc = 0.0
        for i in range(nt):
            acc += bv[i] * sin(tv[i] * xm)
        ov[m] = acc
    return out


def tk_vector(w, double xi, double omega, int m):
    """Sample even moments T_k = mean(((w - xi)/omega)^(2k)) for k = 1..m."""
    cdef double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    out = np.zeros(m)
    cdef double[::1] ov = out
    cdef Py_ssize_t j, k, n = wv.shape[0]
    cdef double y, p
    for j in range(n):
        y = (wv[j] - xi) / omega
        y = y * y
        p = 1.0
        for k in range(m):
            p *= y
            ov[k] += p
    for k in range(m):
        ov[k] /= n
    return out
