# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Boolean-matrix kernels.

Every function takes C-contiguous ``uint8`` arrays holding 0/1 and mirrors the
signature of its counterpart in :mod:`paradp._pykernels`.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def bool_matmul(const unsigned char[:, ::1] a, const unsigned char[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0], m = a.shape[1], p = b.shape[1]
    cdef Py_ssize_t i, k, j
    out = np.zeros((n, p), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    if b.shape[0] != m:
        raise ValueError("inner dimensions differ")
    with nogil:
        for i in range(n):
            for k in range(m):
                if a[i, k]:
                    for j in range(p):
                        o[i, j] |= b[k, j]
    return out


def transitive_closure(const unsigned char[:, ::1] rel):
    cdef Py_ssize_t n = rel.shape[0]
    cdef Py_ssize_t i, j, k
    out = np.array(rel, dtype=np.uint8, copy=True)
    cdef unsigned char[:, ::1] c = out
    with nogil:
        for k in range(n):
            for i in range(n):
                if c[i, k]:
                    for j in range(n):
                        if c[k, j]:
                            c[i, j] = 1
    return out


def monotone_witness(const unsigned char[:, ::1] feas,
                     const unsigned char[:, ::1] fle,
                     const unsigned char[:, ::1] rle):
    cdef Py_ssize_t nf = feas.shape[0], nr = feas.shape[1]
    cdef Py_ssize_t f, g, r, s
    # rows must be upper sets of R
    for f in range(nf):
        for r in range(nr):
            if feas[f, r]:
                for s in range(nr):
                    if rle[r, s] and not feas[f, s]:
                        return (f, f, r, s)
    # g <= f implies row(f) within row(g)
    for f in range(nf):
        for g in range(nf):
            if g != f and fle[g, f]:
                for r in range(nr):
                    if feas[f, r] and not feas[g, r]:
                        return (f, g, r, r)
    return None


def minimal_mask(const unsigned char[:, ::1] le, const unsigned char[::1] mask):
    cdef Py_ssize_t n = le.shape[0]
    cdef Py_ssize_t i, j
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef bint dominated
    with nogil:
        for i in range(n):
            if not mask[i]:
                continue
            dominated = 0
            for j in range(n):
                if j != i and mask[j] and le[j, i] and not le[i, j]:
                    dominated = 1
                    break
            if not dominated:
                o[i] = 1
    return out
