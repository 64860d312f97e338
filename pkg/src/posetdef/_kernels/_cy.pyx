# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts as ``_py.py``, limited to n <= 64."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int pc(uint64_t x) noexcept nogil:
    return __builtin_popcountll(x)


cdef struct BBState:
    int best
    uint64_t witness
    uint64_t ones
    uint64_t zeros


cdef void _bb(BBState* st, const uint64_t* incomp, uint64_t cur, uint64_t cand,
              int c0, int c1) noexcept nogil:
    cdef int val = c0 if c0 < c1 else c1
    cdef int b0, b1, v
    cdef uint64_t low, higher
    if val > st.best:
        st.best = val
        st.witness = cur
    while cand:
        b0 = c0 + pc(cand & st.zeros)
        b1 = c1 + pc(cand & st.ones)
        if (b0 if b0 < b1 else b1) <= st.best:
            return
        low = cand & (~cand + 1)
        v = __builtin_ctzll(low)
        cand ^= low
        higher = ~((low << 1) - 1) if v < 63 else 0
        if st.ones & low:
            _bb(st, incomp, cur | low, cand & incomp[v] & higher, c0, c1 + 1)
        else:
            _bb(st, incomp, cur | low, cand & incomp[v] & higher, c0 + 1, c1)


def best_bichromatic_antichain(int n, incomp, ones):
    if n > 64:
        raise ValueError("compiled kernel supports n <= 64")
    cdef uint64_t arr[64]
    cdef int i
    for i in range(n):
        arr[i] = <uint64_t>incomp[i]
    cdef BBState st
    cdef uint64_t full = (<uint64_t>1 << n) - 1 if n < 64 else <uint64_t>0xFFFFFFFFFFFFFFFF
    st.best = -1
    st.witness = 0
    st.ones = <uint64_t>ones
    st.zeros = full & ~st.ones
    with nogil:
        _bb(&st, arr, 0, full, 0, 0)
    return st.best, int(st.witness)


cdef void _bk(list out, const uint64_t* incomp, uint64_t r, uint64_t p, uint64_t x,
              int rc, uint64_t counted, int threshold):
    cdef uint64_t px, low, todo, nv
    cdef int u, d, pivot, pivot_deg, v
    if p == 0 and x == 0:
        if rc > threshold:
            out.append(r)
        return
    if rc + pc(p & counted) <= threshold:
        return
    px = p | x
    pivot = -1
    pivot_deg = -1
    while px:
        low = px & (~px + 1)
        u = __builtin_ctzll(low)
        px ^= low
        d = pc(p & incomp[u])
        if d > pivot_deg:
            pivot = u
            pivot_deg = d
    todo = p & ~incomp[pivot]
    while todo:
        low = todo & (~todo + 1)
        v = __builtin_ctzll(low)
        todo ^= low
        nv = incomp[v]
        _bk(out, incomp, r | low, p & nv, x & nv, rc + (1 if counted & low else 0),
            counted, threshold)
        p &= ~low
        x |= low
        if rc + pc(p & counted) <= threshold:
            return


def maximal_antichains(int n, incomp, allowed, counted, int threshold):
    if n > 64:
        raise ValueError("compiled kernel supports n <= 64")
    cdef uint64_t arr[64]
    cdef uint64_t al = <uint64_t>allowed
    cdef int i
    for i in range(n):
        arr[i] = (<uint64_t>incomp[i]) & al
    out = []
    _bk(out, arr, 0, al, 0, 0, <uint64_t>counted, threshold)
    res = [int(m) for m in out]
    res.sort()
    return res


def tuple_type_masks(R, tuples):
    cdef const cnp.uint8_t[:, ::1] r = np.ascontiguousarray(R, dtype=np.uint8)
    cdef const int64_t[:, ::1] t = np.ascontiguousarray(tuples, dtype=np.int64)
    cdef Py_ssize_t T = t.shape[0]
    cdef Py_ssize_t U = r.shape[0]
    cdef Py_ssize_t k = t.shape[1] if T else 0
    out_arr = np.zeros(T, dtype=np.uint64)
    cdef uint64_t[::1] out = out_arr
    cdef Py_ssize_t a, u, j
    cdef uint64_t m
    cdef int idx
    with nogil:
        for a in range(T):
            m = 0
            for u in range(U):
                idx = 0
                for j in range(k):
                    idx |= r[u, t[a, j]] << j
                m |= (<uint64_t>1) << idx
            out[a] = m
    return out_arr
