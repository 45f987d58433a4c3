# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled double-description clip step; mirrors ``_dd.clip``."""
import numpy as np

from libc.stdint cimport uint64_t


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int _pop(const uint64_t[::1] z, Py_ssize_t W) noexcept nogil:
    cdef int c = 0
    cdef Py_ssize_t w
    for w in range(W):
        c += __builtin_popcountll(z[w])
    return c


def clip(const double[:, ::1] V, const uint64_t[:, ::1] I, const double[::1] a, double b,
         int col, int ndim, double eps):
    cdef Py_ssize_t k = V.shape[0], n = V.shape[1], W = I.shape[1]
    cdef Py_ssize_t i, j, r, w, d, q
    cdef Py_ssize_t word = col // 64
    cdef uint64_t mask = (<uint64_t>1) << (col % 64)
    cdef double acc, lam
    cdef int np_ = 0, nm = 0, nz = 0, nnew = 0
    cdef bint sub, adjacent

    s_arr = np.empty(k, dtype=np.float64)
    cls_arr = np.empty(k, dtype=np.int8)
    cdef double[::1] s = s_arr
    cdef signed char[::1] cls = cls_arr
    for i in range(k):
        acc = 0.0
        for d in range(n):
            acc += V[i, d] * a[d]
        acc -= b
        s[i] = acc
        if acc > eps:
            cls[i] = 1
            np_ += 1
        elif acc < -eps:
            cls[i] = -1
            nm += 1
        else:
            cls[i] = 0
            nz += 1

    I2_arr = np.array(I, dtype=np.uint64, copy=True)
    cdef uint64_t[:, ::1] I2 = I2_arr
    for i in range(k):
        if cls[i] == 0:
            I2[i, word] |= mask
    if np_ == 0:
        return np.asarray(V), I2_arr, 1
    if nm == 0:
        keep = cls_arr == 0
        return np.asarray(V)[keep], I2_arr[keep], 2

    cap = np_ * nm
    nv_arr = np.empty((cap, n), dtype=np.float64)
    ni_arr = np.empty((cap, W), dtype=np.uint64)
    z_arr = np.empty(W, dtype=np.uint64)
    cdef double[:, ::1] NV = nv_arr
    cdef uint64_t[:, ::1] NI = ni_arr
    cdef uint64_t[::1] Z = z_arr

    for i in range(k):
        if cls[i] != 1:
            continue
        for j in range(k):
            if cls[j] != -1:
                continue
            for w in range(W):
                Z[w] = I[i, w] & I[j, w]
            if _pop(Z, W) < ndim - 1:
                continue
            adjacent = True
            for r in range(k):
                if r == i or r == j:
                    continue
                sub = True
                for w in range(W):
                    if (I[r, w] & Z[w]) != Z[w]:
                        sub = False
                        break
                if sub:
                    adjacent = False
                    break
            if not adjacent:
                continue
            lam = s[j] / (s[j] - s[i])
            for d in range(n):
                NV[nnew, d] = V[j, d] + lam * (V[i, d] - V[j, d])
            for w in range(W):
                NI[nnew, w] = Z[w]
            NI[nnew, word] |= mask
            nnew += 1

    keep = cls_arr != 1
    V2 = np.vstack([np.asarray(V)[keep], nv_arr[:nnew]])
    I3 = np.vstack([I2_arr[keep], ni_arr[:nnew]])
    return np.ascontiguousarray(V2), np.ascontiguousarray(I3), 0
