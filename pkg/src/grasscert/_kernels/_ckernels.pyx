# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in the nets and box-counting code."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def sq_dists(elems, x):
    cdef double[:, ::1] e = np.ascontiguousarray(elems, dtype=np.float64).reshape(-1, len(x))
    cdef double[::1] v = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = e.shape[0], m = e.shape[1], i, j
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double acc, d
    for i in range(n):
        acc = 0.0
        for j in range(m):
            d = e[i, j] - v[j]
            acc += d * d
        o[i] = acc
    return out


def first_within(elems, x, double thr):
    cdef double[:, ::1] e = np.ascontiguousarray(elems, dtype=np.float64).reshape(-1, len(x))
    cdef double[::1] v = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = e.shape[0], m = e.shape[1], i, j
    cdef double acc, d
    for i in range(n):
        acc = 0.0
        for j in range(m):
            d = e[i, j] - v[j]
            acc += d * d
            if acc >= thr:
                break
        if acc < thr:
            return i
    return -1


cdef Py_ssize_t _count_sorted(cnp.uint64_t[::1] keys) nogil:
    cdef Py_ssize_t i, c = 0
    if keys.shape[0] == 0:
        return 0
    c = 1
    for i in range(1, keys.shape[0]):
        if keys[i] != keys[i - 1]:
            c += 1
    return c


def cell_counts(grid, shifts):
    g = np.asarray(grid, dtype=np.int64)
    g = g - g.min(axis=0)
    cdef Py_ssize_t n = g.shape[0], d = g.shape[1], i, j, s_idx
    cdef int bits = max(int(g.max()).bit_length(), 1)
    out = np.empty(len(shifts), dtype=np.int64)
    if d * bits > 64:
        for s_idx in range(len(shifts)):
            out[s_idx] = np.unique(g >> int(shifts[s_idx]), axis=0).shape[0]
        return out
    cdef cnp.int64_t[:, ::1] gv = np.ascontiguousarray(g)
    keys = np.empty(n, dtype=np.uint64)
    cdef cnp.uint64_t[::1] kv = keys
    cdef cnp.uint64_t key
    cdef int sh
    for s_idx in range(len(shifts)):
        sh = shifts[s_idx]
        for i in range(n):
            key = 0
            for j in range(d):
                key = (key << bits) | <cnp.uint64_t>(gv[i, j] >> sh)
            kv[i] = key
        keys.sort()
        out[s_idx] = _count_sorted(kv)
    return out
