# cython: language_level=3
"""Compiled corner kernels; same contracts as ``costdro._kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log

cnp.import_array()


def corner_min(const double[::1] a, const double[:, ::1] Z, const double[:, ::1] X, const double[:, ::1] V):
    cdef Py_ssize_t N = Z.shape[0], m = Z.shape[1], K = V.shape[0]
    cdef Py_ssize_t j, k, i, best_k
    cdef double zx, val, best
    vals_arr = np.empty(N, dtype=np.float64)
    idx_arr = np.empty(N, dtype=np.int64)
    cdef double[::1] vals = vals_arr
    cdef long long[::1] idx = idx_arr
    with nogil:
        for j in range(N):
            zx = 0.0
            for i in range(m):
                zx = zx + Z[j, i] * X[j, i]
            best = 0.0
            best_k = -1
            for k in range(K):
                val = 0.0
                for i in range(m):
                    val = val + Z[j, i] * V[k, i]
                val = a[k] + val - zx
                if best_k < 0 or val < best:
                    best = val
                    best_k = k
            vals[j] = best
            idx[j] = best_k
    return vals_arr, idx_arr


def softmin(const double[::1] a, const double[:, ::1] Z, const double[:, ::1] X, const double[:, ::1] V, double tau):
    cdef Py_ssize_t N = Z.shape[0], m = Z.shape[1], K = V.shape[0]
    cdef Py_ssize_t j, k, i
    cdef double zx, val, mn, s, inv_tau = 1.0 / tau, inv_n = 1.0 / N, p
    vals_arr = np.empty(N, dtype=np.float64)
    q_arr = np.zeros(K, dtype=np.float64)
    pv_arr = np.zeros((N, m), dtype=np.float64)
    buf_arr = np.empty(K, dtype=np.float64)
    cdef double[::1] vals = vals_arr
    cdef double[::1] q = q_arr
    cdef double[:, ::1] pv = pv_arr
    cdef double[::1] buf = buf_arr
    with nogil:
        for j in range(N):
            zx = 0.0
            for i in range(m):
                zx = zx + Z[j, i] * X[j, i]
            mn = 0.0
            for k in range(K):
                val = 0.0
                for i in range(m):
                    val = val + Z[j, i] * V[k, i]
                val = a[k] + val - zx
                buf[k] = val
                if k == 0 or val < mn:
                    mn = val
            s = 0.0
            for k in range(K):
                buf[k] = exp(-(buf[k] - mn) * inv_tau)
                s = s + buf[k]
            vals[j] = mn - tau * log(s)
            for k in range(K):
                p = buf[k] / s
                q[k] = q[k] + p * inv_n
                if p > 0.0:
                    for i in range(m):
                        pv[j, i] = pv[j, i] + p * V[k, i]
    return vals_arr, q_arr, pv_arr
