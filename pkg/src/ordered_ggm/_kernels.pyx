# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled ordered-transmission stopping rule (see ``_kernels_py``)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef inline void _order_row(const double[:, ::1] L, Py_ssize_t r, Py_ssize_t K,
                            Py_ssize_t* idx, double* mag) noexcept nogil:
    # stable insertion sort by descending magnitude; mag[j] tracks |L[r, idx[j]]|
    cdef Py_ssize_t i, j
    cdef double m
    for i in range(K):
        m = fabs(L[r, i])
        j = i
        while j > 0 and mag[j - 1] < m:
            idx[j] = idx[j - 1]
            mag[j] = mag[j - 1]
            j -= 1
        idx[j] = i
        mag[j] = m


def ordered_stops(values, double two_tau):
    cdef const double[:, ::1] L = np.ascontiguousarray(values, dtype=np.float64)
    if L.ndim != 2 or L.shape[1] == 0:
        raise ValueError("values must be a non-empty (n, K) array")
    cdef Py_ssize_t n = L.shape[0], K = L.shape[1]
    stop_arr = np.empty(n, dtype=np.int64)
    dec_arr = np.empty(n, dtype=np.int8)
    cdef cnp.int64_t[::1] stop = stop_arr
    cdef cnp.int8_t[::1] dec = dec_arr
    cdef Py_ssize_t[::1] idx = np.empty(K, dtype=np.intp)
    cdef double[::1] mag = np.empty(K, dtype=np.float64)
    cdef Py_ssize_t r, t
    cdef double partial, m, rem, v
    with nogil:
        for r in range(n):
            _order_row(L, r, K, &idx[0], &mag[0])
            partial = 0.0
            for t in range(K):
                v = L[r, idx[t]]
                partial = partial + v
                m = mag[t]
                rem = <double>(K - t - 1)
                if partial >= two_tau + rem * m:
                    stop[r] = t + 1
                    dec[r] = 1
                    break
                if partial < two_tau - rem * m:
                    stop[r] = t + 1
                    dec[r] = 0
                    break
    return stop_arr, dec_arr
