# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot kernels.

Fuses the per-pair distance and gradient loops that the numpy backend
spells out as chained array operations. Semantics match
``_numpy_impl`` (same specialization rules, same subgradient choice at
coincident points); agreement is enforced by the test suite.
"""

from libc.math cimport fabs, pow, sqrt

import numpy as np

NAME = "native"


cdef inline double ipow(double base, int k) noexcept nogil:
    # integer power by repeated multiplication; orders of magnitude
    # cheaper than libm pow for the small exponents used here
    cdef double result = 1.0
    cdef int i
    for i in range(k):
        result *= base
    return result


def pairwise_distance(double[:, ::1] x, double[:, ::1] y, int p, bint general):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t dim = x.shape[1]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double acc, delta

    with nogil:
        if not general and p == 1:
            for i in range(n):
                acc = 0.0
                for j in range(dim):
                    acc += fabs(x[i, j] - y[i, j])
                out[i] = acc
        elif not general and p == 2:
            for i in range(n):
                acc = 0.0
                for j in range(dim):
                    delta = x[i, j] - y[i, j]
                    acc += delta * delta
                out[i] = sqrt(acc)
        else:
            for i in range(n):
                acc = 0.0
                for j in range(dim):
                    acc += ipow(fabs(x[i, j] - y[i, j]), p)
                out[i] = pow(acc, 1.0 / p)
    return out_arr


def distance_grad(
    double[:, ::1] x,
    double[:, ::1] y,
    double[::1] d,
    int p,
    bint general,
    double eps,
):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t dim = x.shape[1]
    grad_arr = np.empty((n, dim), dtype=np.float64)
    cdef double[:, ::1] grad = grad_arr
    cdef Py_ssize_t i, j
    cdef double delta, scale

    with nogil:
        for i in range(n):
            if d[i] <= eps:
                for j in range(dim):
                    grad[i, j] = 0.0
                continue
            if not general and p == 1:
                for j in range(dim):
                    delta = x[i, j] - y[i, j]
                    grad[i, j] = 0.0 if delta == 0.0 else (1.0 if delta > 0.0 else -1.0)
            elif not general and p == 2:
                for j in range(dim):
                    grad[i, j] = (x[i, j] - y[i, j]) / d[i]
            else:
                scale = 1.0 / ipow(d[i], p - 1)
                for j in range(dim):
                    delta = x[i, j] - y[i, j]
                    if delta > 0.0:
                        grad[i, j] = ipow(delta, p - 1) * scale
                    elif delta < 0.0:
                        grad[i, j] = -ipow(-delta, p - 1) * scale
    return grad_arr
