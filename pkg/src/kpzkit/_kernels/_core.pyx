# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: patience LIS, LPP grid fill, PNG step transport.

Semantics and arithmetic mirror kpzkit._kernels.fallback exactly; integer
outputs agree exactly with the fallback and float outputs bit-for-bit.
"""

import numpy as np

cimport numpy as cnp
from libc.string cimport memmove

cnp.import_array()

BACKEND = "compiled"


# ---------------------------------------------------------------------------
# patience sorting
# ---------------------------------------------------------------------------

cdef Py_ssize_t _lis_core(const double* v, Py_ssize_t n, double* tops) noexcept nogil:
    cdef Py_ssize_t npiles = 0, lo, hi, mid
    cdef Py_ssize_t i
    cdef double x
    for i in range(n):
        x = v[i]
        lo = 0
        hi = npiles
        while lo < hi:
            mid = (lo + hi) // 2
            if tops[mid] < x:
                lo = mid + 1
            else:
                hi = mid
        tops[lo] = x
        if lo == npiles:
            npiles += 1
    return npiles


def lis_length(values):
    """Length of the longest strictly increasing subsequence."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.ascontiguousarray(
        values, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tops = np.empty(
        v.shape[0], dtype=np.float64)
    if v.shape[0] == 0:
        return 0
    return int(_lis_core(&v[0], v.shape[0], &tops[0]))


def lis_length_batch(values_cat, offsets):
    """lis_length applied to each slice values_cat[offsets[i]:offsets[i+1]]."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.ascontiguousarray(
        values_cat, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] off = np.ascontiguousarray(
        offsets, dtype=np.int64)
    cdef Py_ssize_t nrep = off.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(nrep, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tops = np.empty(
        max(1, v.shape[0]), dtype=np.float64)
    cdef Py_ssize_t i, a, b
    for i in range(nrep):
        a = off[i]
        b = off[i + 1]
        if b > a:
            out[i] = _lis_core(&v[a], b - a, &tops[0])
        else:
            out[i] = 0
    return out


# ---------------------------------------------------------------------------
# last-passage dynamic programming
# ---------------------------------------------------------------------------

def lpp_fill(weights):
    """Last-passage times G[i,j] = w[i,j] + max(G[i-1,j], G[i,j-1])."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w = np.ascontiguousarray(
        weights, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] g = np.empty_like(w)
    cdef Py_ssize_t n = w.shape[0], m = w.shape[1]
    cdef Py_ssize_t i, j
    cdef double best
    for i in range(n):
        for j in range(m):
            best = 0.0
            if i > 0 and g[i - 1, j] > best:
                best = g[i - 1, j]
            if j > 0 and g[i, j - 1] > best:
                best = g[i, j - 1]
            g[i, j] = w[i, j] + best
    return g


# ---------------------------------------------------------------------------
# PNG step transport
# ---------------------------------------------------------------------------

cdef struct PngState:
    double* sx          # reference position per step id
    double* st          # reference time
    signed char* sv     # +1 up-step (moves left), -1 down-step (right)
    unsigned char* alive
    Py_ssize_t nsteps
    cnp.int32_t* order   # live ids, left to right
    Py_ssize_t nlive
    # binary heap of candidate collisions, lexicographic (t, x, seq)
    double* ht
    double* hx
    cnp.int64_t* hseq
    cnp.int32_t* hl
    cnp.int32_t* hr
    Py_ssize_t nheap
    long long seq


cdef inline double _pos(PngState* S, Py_ssize_t i, double t) noexcept nogil:
    return S.sx[i] - S.sv[i] * (t - S.st[i])


cdef inline bint _hless(PngState* S, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    if S.ht[a] != S.ht[b]:
        return S.ht[a] < S.ht[b]
    if S.hx[a] != S.hx[b]:
        return S.hx[a] < S.hx[b]
    return S.hseq[a] < S.hseq[b]


cdef inline void _hswap(PngState* S, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    S.ht[a], S.ht[b] = S.ht[b], S.ht[a]
    S.hx[a], S.hx[b] = S.hx[b], S.hx[a]
    S.hseq[a], S.hseq[b] = S.hseq[b], S.hseq[a]
    S.hl[a], S.hl[b] = S.hl[b], S.hl[a]
    S.hr[a], S.hr[b] = S.hr[b], S.hr[a]


cdef void _hpush(PngState* S, double t, double x, int l, int r) noexcept nogil:
    cdef Py_ssize_t k = S.nheap, parent
    S.ht[k] = t
    S.hx[k] = x
    S.hseq[k] = S.seq
    S.hl[k] = l
    S.hr[k] = r
    S.seq += 1
    S.nheap += 1
    while k > 0:
        parent = (k - 1) // 2
        if _hless(S, k, parent):
            _hswap(S, k, parent)
            k = parent
        else:
            break


cdef void _hpop(PngState* S) noexcept nogil:
    cdef Py_ssize_t k = 0, child
    S.nheap -= 1
    if S.nheap == 0:
        return
    _hswap(S, 0, S.nheap)
    while True:
        child = 2 * k + 1
        if child >= S.nheap:
            break
        if child + 1 < S.nheap and _hless(S, child + 1, child):
            child += 1
        if _hless(S, child, k):
            _hswap(S, k, child)
            k = child
        else:
            break


cdef inline void _schedule(PngState* S, int l, int r, double t_now) noexcept nogil:
    cdef double pl, pr
    if S.sv[l] == -1 and S.sv[r] == 1:
        pl = _pos(S, l, t_now)
        pr = _pos(S, r, t_now)
        _hpush(S, t_now + (pr - pl) / 2.0, (pl + pr) / 2.0, l, r)


cdef void _insert_pair(PngState* S, double x, double s) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = S.nlive, mid
    cdef int u, d
    while lo < hi:
        mid = (lo + hi) // 2
        if _pos(S, S.order[mid], s) < x:
            lo = mid + 1
        else:
            hi = mid
    u = <int>S.nsteps
    d = u + 1
    S.nsteps += 2
    S.sx[u] = x
    S.st[u] = s
    S.sv[u] = 1
    S.alive[u] = 1
    S.sx[d] = x
    S.st[d] = s
    S.sv[d] = -1
    S.alive[d] = 1
    memmove(S.order + lo + 2, S.order + lo,
            (S.nlive - lo) * sizeof(int))
    S.order[lo] = u
    S.order[lo + 1] = d
    S.nlive += 2
    if lo > 0:
        _schedule(S, S.order[lo - 1], u, s)
    if lo + 2 < S.nlive:
        _schedule(S, d, S.order[lo + 2], s)


cdef Py_ssize_t _index_of(PngState* S, int l) noexcept nogil:
    cdef Py_ssize_t k
    for k in range(S.nlive):
        if S.order[k] == l:
            return k
    return -1


def png_evolve_steps(xs, ss, double t_end):
    """Transport an interface of traveling steps through nucleations.

    Same contract as the fallback: events pre-sorted by (s, x); returns
    (step_x, step_dir, ann_x, ann_t).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ex = np.ascontiguousarray(
        xs, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] es = np.ascontiguousarray(
        ss, dtype=np.float64)
    cdef Py_ssize_t nev = ex.shape[0]
    cdef Py_ssize_t cap = 2 * nev + 2

    buf_sx = np.empty(cap, dtype=np.float64)
    buf_st = np.empty(cap, dtype=np.float64)
    buf_sv = np.empty(cap, dtype=np.int8)
    buf_alive = np.zeros(cap, dtype=np.uint8)
    buf_order = np.empty(cap, dtype=np.int32)
    buf_ht = np.empty(cap + 4 * nev + 4, dtype=np.float64)
    buf_hx = np.empty(cap + 4 * nev + 4, dtype=np.float64)
    buf_hseq = np.empty(cap + 4 * nev + 4, dtype=np.int64)
    buf_hl = np.empty(cap + 4 * nev + 4, dtype=np.int32)
    buf_hr = np.empty(cap + 4 * nev + 4, dtype=np.int32)
    ann_x_buf = np.empty(nev + 1, dtype=np.float64)
    ann_t_buf = np.empty(nev + 1, dtype=np.float64)

    cdef cnp.ndarray[cnp.float64_t, ndim=1] a_sx = buf_sx
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a_st = buf_st
    cdef cnp.ndarray[cnp.int8_t, ndim=1] a_sv = buf_sv
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] a_alive = buf_alive
    cdef cnp.ndarray[cnp.int32_t, ndim=1] a_order = buf_order
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a_ht = buf_ht
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a_hx = buf_hx
    cdef cnp.ndarray[cnp.int64_t, ndim=1] a_hseq = buf_hseq
    cdef cnp.ndarray[cnp.int32_t, ndim=1] a_hl = buf_hl
    cdef cnp.ndarray[cnp.int32_t, ndim=1] a_hr = buf_hr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a_ann_x = ann_x_buf
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a_ann_t = ann_t_buf

    cdef PngState S
    S.sx = &a_sx[0]
    S.st = &a_st[0]
    S.sv = <signed char*>&a_sv[0]
    S.alive = &a_alive[0]
    S.nsteps = 0
    S.order = &a_order[0]
    S.nlive = 0
    S.ht = &a_ht[0]
    S.hx = &a_hx[0]
    S.hseq = &a_hseq[0]
    S.hl = &a_hl[0]
    S.hr = &a_hr[0]
    S.nheap = 0
    S.seq = 0

    cdef Py_ssize_t iev = 0, nann = 0, k
    cdef bint have_coll, have_nuc, take_nuc
    cdef double tc = 0.0, xc = 0.0
    cdef int l = 0, r = 0

    with nogil:
        while True:
            have_coll = False
            while S.nheap > 0:
                tc = S.ht[0]
                xc = S.hx[0]
                l = S.hl[0]
                r = S.hr[0]
                if S.alive[l] and S.alive[r]:
                    k = _index_of(&S, l)
                    if k + 1 < S.nlive and S.order[k + 1] == r:
                        have_coll = True
                        break
                _hpop(&S)
            have_nuc = iev < nev
            if not have_coll and not have_nuc:
                break
            if have_coll and tc > t_end and not have_nuc:
                break
            take_nuc = False
            if have_nuc:
                if not have_coll:
                    take_nuc = True
                elif es[iev] < tc or (es[iev] == tc and ex[iev] <= xc):
                    take_nuc = True
            if take_nuc:
                _insert_pair(&S, ex[iev], es[iev])
                iev += 1
                continue
            if tc > t_end:
                break
            _hpop(&S)
            S.alive[l] = 0
            S.alive[r] = 0
            memmove(S.order + k, S.order + k + 2,
                    (S.nlive - k - 2) * sizeof(int))
            S.nlive -= 2
            a_ann_x[nann] = xc
            a_ann_t[nann] = tc
            nann += 1
            if 0 < k < S.nlive:
                _schedule(&S, S.order[k - 1], S.order[k], tc)

    out_x = np.empty(S.nlive, dtype=np.float64)
    out_v = np.empty(S.nlive, dtype=np.int8)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] o_x = out_x
    cdef cnp.ndarray[cnp.int8_t, ndim=1] o_v = out_v
    for k in range(S.nlive):
        o_x[k] = _pos(&S, S.order[k], t_end)
        o_v[k] = S.sv[S.order[k]]
    return out_x, out_v, ann_x_buf[:nann].copy(), ann_t_buf[:nann].copy()


def png_origin_height_batch(xs_cat, ss_cat, offsets, double t_end,
                            double query_x=0.0):
    """Height at query_x and time t_end for each replica's nucleation set."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] off = np.ascontiguousarray(
        offsets, dtype=np.int64)
    cdef Py_ssize_t nrep = off.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(nrep, dtype=np.int64)
    xs_cat = np.ascontiguousarray(xs_cat, dtype=np.float64)
    ss_cat = np.ascontiguousarray(ss_cat, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef long long h
    for i in range(nrep):
        step_x, step_v, _, _ = png_evolve_steps(
            xs_cat[off[i]:off[i + 1]], ss_cat[off[i]:off[i + 1]], t_end)
        h = 0
        for j in range(step_x.shape[0]):
            if step_v[j] == 1:
                if step_x[j] <= query_x:
                    h += 1
            else:
                if step_x[j] < query_x:
                    h -= 1
        out[i] = h
    return out
