# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float kernels; see _pykernels for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport atan, fabs, M_PI

cnp.import_array()


def iterate_float(coeffs, double x0, Py_ssize_t steps, double rel_tol):
    cdef double[:, ::1] cf = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef Py_ssize_t k = cf.shape[0]
    out_arr = np.empty(steps + 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double x = x0, cx, den, scale, a, b, c, d
    cdef Py_ssize_t n, row
    out[0] = x
    for n in range(steps):
        row = n % k
        a = cf[row, 0]
        b = cf[row, 1]
        c = cf[row, 2]
        d = cf[row, 3]
        cx = c * x
        den = cx + d
        scale = 1.0
        if fabs(cx) > scale:
            scale = fabs(cx)
        if fabs(d) > scale:
            scale = fabs(d)
        if fabs(den) <= rel_tol * scale:
            return out_arr[: n + 1], n + 1
        x = (a * x + b) / den
        out[n + 1] = x
    return out_arr, -1


def angle_histogram(values, Py_ssize_t bins):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    counts_arr = np.zeros(bins, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef double width = 2.0 * M_PI / bins
    cdef Py_ssize_t i, j
    for i in range(v.shape[0]):
        j = <Py_ssize_t>((2.0 * atan(v[i]) + M_PI) / width)
        if j >= bins:
            j = bins - 1
        counts[j] += 1
    return counts_arr
