"""Pure-Python kernels (reference backend).

Every function here has a compiled twin in ``_cy.pyx`` with the same
signature and the same deterministic output.
"""

import numpy as np


def _popcount(x):
    return bin(x).count("1")


def best_bichromatic_antichain(n, incomp, ones):
    """Maximise ``min(#zeros, #ones)`` over antichains.

    ``incomp[i]`` is the mask of elements incomparable to ``i``; ``ones``
    is the mask of elements coloured 1.  Returns ``(value, mask)`` where the
    mask is the lexicographically least optimal antichain (members listed
    in increasing order, a proper prefix sorting first).
    """
    full = (1 << n) - 1
    zeros = full & ~ones
    best = [-1, 0]

    def search(cur, cand, c0, c1):
        val = c0 if c0 < c1 else c1
        if val > best[0]:
            best[0] = val
            best[1] = cur
        while cand:
            b0 = c0 + _popcount(cand & zeros)
            b1 = c1 + _popcount(cand & ones)
            if (b0 if b0 < b1 else b1) <= best[0]:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            higher = ~((low << 1) - 1)
            if ones & low:
                search(cur | low, cand & incomp[v] & higher, c0, c1 + 1)
            else:
                search(cur | low, cand & incomp[v] & higher, c0 + 1, c1)

    search(0, full, 0, 0)
    return best[0], best[1]


def maximal_antichains(n, incomp, allowed, counted, threshold):
    """Maximal cliques of the incomparability graph restricted to ``allowed``
    having more than ``threshold`` members inside ``counted``.

    Bron-Kerbosch with pivoting; branches that cannot exceed the threshold
    are cut.  Output is sorted by mask value.
    """
    out = []

    def expand(r, p, x, rc):
        if not p and not x:
            if rc > threshold:
                out.append(r)
            return
        if rc + _popcount(p & counted) <= threshold:
            return
        px = p | x
        pivot, pivot_deg = -1, -1
        while px:
            low = px & -px
            u = low.bit_length() - 1
            px ^= low
            d = _popcount(p & incomp[u])
            if d > pivot_deg:
                pivot, pivot_deg = u, d
        todo = p & ~incomp[pivot]
        while todo:
            low = todo & -todo
            v = low.bit_length() - 1
            todo ^= low
            nv = incomp[v]
            expand(r | low, p & nv, x & nv, rc + (1 if counted & low else 0))
            p &= ~low
            x |= low
            if rc + _popcount(p & counted) <= threshold:
                return

    restricted = [m & allowed for m in incomp]
    incomp = restricted
    expand(0, allowed, 0, 0)
    out.sort()
    return out


def tuple_type_masks(R, tuples):
    """Delta-type of each column tuple as a bitmask over sign patterns.

    ``R`` is a ``U x B`` 0/1 array, ``tuples`` a ``T x k`` integer array.
    Bit ``s`` of the result is set when some row realises pattern ``s``,
    where position ``j`` of the tuple contributes bit ``j`` of ``s``.
    """
    R = np.asarray(R, dtype=np.uint8)
    tuples = np.asarray(tuples, dtype=np.int64)
    T = tuples.shape[0]
    if T == 0:
        return np.zeros(0, dtype=np.uint64)
    k = tuples.shape[1]
    idx = np.zeros((R.shape[0], T), dtype=np.int64)
    for j in range(k):
        idx |= R[:, tuples[:, j]].astype(np.int64) << j
    masks = np.zeros(T, dtype=np.uint64)
    one = np.uint64(1)
    for u in range(R.shape[0]):
        masks |= one << idx[u].astype(np.uint64)
    return masks
