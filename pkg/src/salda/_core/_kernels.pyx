# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: pairwise distances, heat-kernel weights, weighted
outer-product accumulation.  Mirrors ``_kernels_py`` exactly; the dispatcher
in ``salda._core`` picks whichever is importable."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()


def pairwise_dists(const double[:, ::1] x):
    """Euclidean distance matrix between the rows of ``x``.

    Distances between identical rows come out exactly 0 (differences are
    computed directly, not via the expanded quadratic form).
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc, diff
    out_arr = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(d):
                diff = x[i, k] - x[j, k]
                acc += diff * diff
            acc = sqrt(acc)
            out[i, j] = acc
            out[j, i] = acc
    return out_arr


def heat_weights(const double[:, ::1] dists, double sigma, bint squared):
    """Heat-kernel affinities exp(-d / 2 sigma^2), zero diagonal.

    With ``squared`` the exponent uses d^2 instead of d.
    """
    cdef Py_ssize_t n = dists.shape[0]
    cdef Py_ssize_t i, j
    cdef double denom = 2.0 * sigma * sigma
    cdef double d
    out_arr = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d = dists[i, j]
            if squared:
                d = d * d
            out[i, j] = exp(-d / denom)
    return out_arr


def weighted_scatter(const double[:, ::1] x, const double[::1] center, const double[::1] weights):
    """sum_k w_k (x_k - center)(x_k - center)^T over the rows of ``x``."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t k, i, j
    cdef double w, di
    dev_arr = np.empty(d, dtype=np.float64)
    out_arr = np.zeros((d, d), dtype=np.float64)
    cdef double[::1] dev = dev_arr
    cdef double[:, ::1] out = out_arr
    for k in range(n):
        w = weights[k]
        for i in range(d):
            dev[i] = x[k, i] - center[i]
        for i in range(d):
            di = w * dev[i]
            for j in range(d):
                out[i, j] += di * dev[j]
    return out_arr
