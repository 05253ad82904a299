# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in :mod:`cuspflow._fallback`."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, INFINITY, isfinite

cnp.import_array()


def weighted_moments(phi_in, tau_in, delta_in):
    cdef double[::1] phi = np.ascontiguousarray(phi_in, dtype=np.float64)
    cdef double[::1] tau = np.ascontiguousarray(tau_in, dtype=np.float64)
    cdef double[::1] delta = np.ascontiguousarray(delta_in, dtype=np.float64)
    cdef Py_ssize_t i, n = phi.shape[0]
    cdef double top = -INFINITY, w, s = 0.0, st = 0.0, sp = 0.0, sd = 0.0
    if n == 0:
        return -INFINITY, 0.0, 0.0, 0.0
    for i in range(n):
        if phi[i] > top:
            top = phi[i]
    if not isfinite(top):
        return top, 0.0, 0.0, 0.0
    for i in range(n):
        w = exp(phi[i] - top)
        s += w
        st += w * tau[i]
        sp += w * phi[i]
        sd += w * delta[i]
    return top + log(s), st / s, sp / s, sd / s


def roof_values(a_in, b_in, kappa_in, eta_in):
    cdef double complex[::1] a = np.ascontiguousarray(a_in, dtype=np.complex128)
    cdef double complex[::1] b = np.ascontiguousarray(b_in, dtype=np.complex128)
    cdef double[::1] kappa = np.ascontiguousarray(kappa_in, dtype=np.float64)
    cdef double complex[::1] eta = np.ascontiguousarray(eta_in, dtype=np.complex128)
    cdef Py_ssize_t i, j, n = a.shape[0], k = eta.shape[0]
    mean = np.empty(n)
    lo = np.empty(n)
    hi = np.empty(n)
    cdef double[::1] mv = mean, lv = lo, hv = hi
    cdef double complex z
    cdef double v, acc, vmin, vmax
    for i in range(n):
        acc = 0.0
        vmin = INFINITY
        vmax = -INFINITY
        for j in range(k):
            z = a[i] * eta[j] + b[i]
            v = 2.0 * kappa[i] + log(z.real * z.real + z.imag * z.imag)
            acc += v
            if v < vmin:
                vmin = v
            if v > vmax:
                vmax = v
        mv[i] = acc / k
        lv[i] = vmin
        hv[i] = vmax
    return mean, lo, hi


def periodic_log_traces(log_q_in, Py_ssize_t start, Py_ssize_t n_max):
    cdef double[:, ::1] lq = np.ascontiguousarray(log_q_in, dtype=np.float64)
    cdef Py_ssize_t n = lq.shape[0], k, x, y
    cur_a = np.full(n, -INFINITY)
    nxt_a = np.empty(n)
    out = np.empty(n_max)
    cdef double[::1] cur = cur_a, nxt = nxt_a, ov = out
    cdef double top, s, z
    cur[start] = 0.0
    for k in range(n_max):
        for y in range(n):
            top = -INFINITY
            for x in range(n):
                z = cur[x] + lq[x, y]
                if z > top:
                    top = z
            if not isfinite(top):
                nxt[y] = -INFINITY
                continue
            s = 0.0
            for x in range(n):
                z = cur[x] + lq[x, y]
                if isfinite(z):
                    s += exp(z - top)
            nxt[y] = top + log(s)
        for y in range(n):
            cur[y] = nxt[y]
        ov[k] = cur[start]
    return out


def block_logsums(phi_in, idx_in, Py_ssize_t n_blocks):
    cdef double[::1] phi = np.ascontiguousarray(phi_in, dtype=np.float64)
    cdef long long[::1] idx = np.ascontiguousarray(idx_in, dtype=np.int64)
    cdef Py_ssize_t i, j, n = phi.shape[0]
    top_a = np.full(n_blocks, -INFINITY)
    acc_a = np.zeros(n_blocks)
    cdef double[::1] top = top_a, acc = acc_a
    for i in range(n):
        j = idx[i]
        if 0 <= j < n_blocks and phi[i] > top[j]:
            top[j] = phi[i]
    for i in range(n):
        j = idx[i]
        if 0 <= j < n_blocks and isfinite(top[j]):
            acc[j] += exp(phi[i] - top[j])
    out = np.full(n_blocks, -INFINITY)
    cdef double[::1] ov = out
    for j in range(n_blocks):
        if acc[j] > 0:
            ov[j] = top[j] + log(acc[j])
    return out
