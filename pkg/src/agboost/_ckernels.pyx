# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def fwht(values):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arr = np.array(values, dtype=np.float64, copy=True)
    cdef double[::1] out = arr
    cdef Py_ssize_t size = out.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef double x, y
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    with nogil:
        while h < size:
            i = 0
            while i < size:
                for j in range(i, i + h):
                    x = out[j]
                    y = out[j + h]
                    out[j] = x + y
                    out[j + h] = x - y
                i += 2 * h
            h *= 2
    return arr


def fold_clip(h0, weights, bases):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arr = np.array(h0, dtype=np.float64, copy=True)
    cdef double[::1] h = arr
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[:, ::1] b = np.ascontiguousarray(bases, dtype=np.float64)
    cdef Py_ssize_t k, x, npts = h.shape[0]
    cdef double v
    if b.shape[0] != w.shape[0] or (b.shape[0] and b.shape[1] != npts):
        raise ValueError("shape mismatch")
    with nogil:
        for k in range(b.shape[0]):
            for x in range(npts):
                v = h[x] + w[k] * b[k, x]
                if v > 1.0:
                    v = 1.0
                elif v < -1.0:
                    v = -1.0
                h[x] = v
    return arr


def bucket_sums(u, w, prefixes):
    cdef const unsigned long long[::1] uu = np.ascontiguousarray(u, dtype=np.uint64)
    cdef const double[::1] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef const unsigned long long[::1] pp = np.ascontiguousarray(prefixes, dtype=np.uint64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arr = np.zeros(pp.shape[0], dtype=np.float64)
    cdef double[::1] out = arr
    cdef Py_ssize_t m = uu.shape[0], s, k
    cdef unsigned long long p
    cdef double acc
    if ww.shape[0] != m:
        raise ValueError("shape mismatch")
    if m == 0:
        return arr
    with nogil:
        for k in range(pp.shape[0]):
            p = pp[k]
            acc = 0.0
            for s in range(m):
                acc += ww[s] * (1 - 2 * (__builtin_popcountll(p & uu[s]) & 1))
            out[k] = acc / m
    return arr


def weighted_sum(weights, values):
    # Neumaier compensated summation
    cdef const double[::1] a = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t i, size = a.shape[0]
    cdef double total = 0.0, comp = 0.0, term, t
    if b.shape[0] != size:
        raise ValueError("shape mismatch")
    with nogil:
        for i in range(size):
            term = a[i] * b[i]
            t = total + term
            if abs(total) >= abs(term):
                comp += (total - t) + term
            else:
                comp += (term - t) + total
            total = t
    return total + comp
