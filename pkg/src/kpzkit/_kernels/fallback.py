"""Pure-Python/NumPy reference implementations of the hot kernels.

The compiled module (`kpzkit._kernels._core`) implements the same three
families with identical semantics and identical arithmetic, so integer
outputs agree exactly and float outputs agree bit-for-bit.  Keep the two in
sync: any change here must be mirrored in ``_core.pyx``.
"""

import heapq
from bisect import bisect_left

import numpy as np

BACKEND = "python"


# ---------------------------------------------------------------------------
# patience sorting
# ---------------------------------------------------------------------------

def lis_length(values):
    """Length of the longest strictly increasing subsequence.

    Patience sorting on pile tops: each value replaces the leftmost top that
    is >= value, O(n log n).
    """
    tops = []
    for v in values:
        k = bisect_left(tops, v)
        if k == len(tops):
            tops.append(v)
        else:
            tops[k] = v
    return len(tops)


def lis_length_batch(values_cat, offsets):
    """lis_length applied to each slice values_cat[offsets[i]:offsets[i+1]]."""
    values_cat = np.asarray(values_cat, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.int64)
    out = np.empty(len(offsets) - 1, dtype=np.int64)
    for i in range(len(offsets) - 1):
        out[i] = lis_length(values_cat[offsets[i]:offsets[i + 1]])
    return out


# ---------------------------------------------------------------------------
# last-passage dynamic programming
# ---------------------------------------------------------------------------

def lpp_fill(weights):
    """Last-passage times G[i,j] = w[i,j] + max(G[i-1,j], G[i,j-1]).

    Entries outside the grid count as 0, so G[0,0] = w[0,0].
    """
    w = np.asarray(weights, dtype=np.float64)
    n, m = w.shape
    g = np.empty_like(w)
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
#
# The interface is a finite set of unit steps: an up-step (dir=+1, height
# increases left to right) travels left at speed 1, a down-step (dir=-1)
# travels right.  A nucleation at (x, s) inserts an (up, down) pair at x.
# When an adjacent (down, up) pair meets, both steps annihilate; the meeting
# point is recorded so that a lower line of the multi-line construction can
# nucleate there.
#
# Events are processed in (time, position) order; a nucleation wins a tie
# against a collision at the same (time, position).

def png_evolve_steps(xs, ss, t_end):
    """Transport an interface of traveling steps through nucleations.

    Parameters
    ----------
    xs, ss : arrays of equal length, nucleation positions and times,
        pre-sorted lexicographically by (s, x), all 0 <= s <= t_end.
    t_end : evolution horizon.

    Returns
    -------
    step_x : float64 array, positions of surviving steps at t_end (sorted)
    step_dir : int8 array, +1 up-step / -1 down-step
    ann_x, ann_t : float64 arrays, annihilation points in (t, x) order
    """
    xs = np.asarray(xs, dtype=np.float64)
    ss = np.asarray(ss, dtype=np.float64)
    nev = len(xs)
    cap = 2 * nev + 2
    sx = np.empty(cap)        # reference position of step i
    st = np.empty(cap)        # reference time
    sv = np.empty(cap, dtype=np.int8)   # +1 up (moves left), -1 down (right)
    alive = np.zeros(cap, dtype=bool)
    nsteps = 0

    order = []                # live step ids, left to right
    heap = []                 # (t_coll, x_coll, seq, left_id, right_id)
    seq = 0

    def pos(i, t):
        # up-steps move left, down-steps move right
        return sx[i] - sv[i] * (t - st[i])

    def schedule(l, r, t_now):
        nonlocal seq
        # only a (down, up) pair approaches
        if sv[l] == -1 and sv[r] == 1:
            pl = pos(l, t_now)
            pr = pos(r, t_now)
            tc = t_now + (pr - pl) / 2.0
            xc = (pl + pr) / 2.0
            heapq.heappush(heap, (tc, xc, seq, l, r))
            seq += 1

    def insert_pair(x, s):
        nonlocal nsteps
        lo, hi = 0, len(order)
        while lo < hi:
            mid = (lo + hi) // 2
            if pos(order[mid], s) < x:
                lo = mid + 1
            else:
                hi = mid
        u = nsteps
        d = nsteps + 1
        nsteps += 2
        sx[u] = x
        st[u] = s
        sv[u] = 1
        alive[u] = True
        sx[d] = x
        st[d] = s
        sv[d] = -1
        alive[d] = True
        order.insert(lo, d)
        order.insert(lo, u)
        if lo > 0:
            schedule(order[lo - 1], u, s)
        if lo + 2 < len(order):
            schedule(d, order[lo + 2], s)

    ann_x = []
    ann_t = []
    iev = 0
    while True:
        # next valid collision
        coll = None
        while heap:
            tc, xc, _, l, r = heap[0]
            if alive[l] and alive[r]:
                k = order.index(l)
                if k + 1 < len(order) and order[k + 1] == r:
                    coll = (tc, xc, l, r, k)
                    break
            heapq.heappop(heap)
        have_nuc = iev < nev
        if coll is None and not have_nuc:
            break
        if coll is not None and coll[0] > t_end and not have_nuc:
            break
        # nucleation wins ties at the same (t, x)
        if have_nuc and (coll is None
                         or (ss[iev], xs[iev]) <= (coll[0], coll[1])):
            insert_pair(xs[iev], ss[iev])
            iev += 1
            continue
        tc, xc, l, r, k = coll
        if tc > t_end:
            break
        heapq.heappop(heap)
        alive[l] = False
        alive[r] = False
        del order[k:k + 2]
        ann_x.append(xc)
        ann_t.append(tc)
        if 0 < k < len(order):
            schedule(order[k - 1], order[k], tc)

    out_x = np.array([pos(i, t_end) for i in order], dtype=np.float64)
    out_v = np.array([sv[i] for i in order], dtype=np.int8)
    return out_x, out_v, np.array(ann_x), np.array(ann_t)


def png_origin_height_batch(xs_cat, ss_cat, offsets, t_end, query_x=0.0):
    """Height at query_x and time t_end for each replica's nucleation set."""
    xs_cat = np.asarray(xs_cat, dtype=np.float64)
    ss_cat = np.asarray(ss_cat, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.int64)
    nrep = len(offsets) - 1
    out = np.empty(nrep, dtype=np.int64)
    for i in range(nrep):
        a, b = offsets[i], offsets[i + 1]
        step_x, step_v, _, _ = png_evolve_steps(xs_cat[a:b], ss_cat[a:b],
                                                t_end)
        h = 0
        for p, v in zip(step_x, step_v):
            if (v == 1 and p <= query_x) or (v == -1 and p < query_x):
                h += v
        out[i] = h
    return out
