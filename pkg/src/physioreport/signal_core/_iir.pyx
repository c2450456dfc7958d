# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled direct-form II transposed IIR recursion."""

from cpython.array cimport array, clone

import numpy as np


def lfilter_forward(const double[::1] b, const double[::1] a, const double[::1] x):
    """Causal filtering of ``x``; ``b`` and ``a`` have equal length and a[0] == 1."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t order = b.shape[0] - 1
    cdef Py_ssize_t i, k
    cdef double xi, yi
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef array state_buf = clone(array("d"), order + 1, zero=True)
    cdef double[::1] z = state_buf

    with nogil:
        if order == 0:
            for i in range(n):
                y[i] = b[0] * x[i]
        else:
            for i in range(n):
                xi = x[i]
                yi = b[0] * xi + z[0]
                for k in range(order - 1):
                    z[k] = b[k + 1] * xi + z[k + 1] - a[k + 1] * yi
                z[order - 1] = b[order] * xi - a[order] * yi
                y[i] = yi
    return out
