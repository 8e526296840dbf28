"""Bitset kernels for the combinatorial adjacency test of the DD method.

Zero sets are packed as ``uint64`` words; ray ``i`` is zero on processed row
``t`` iff bit ``t`` is set in ``Z[i]``.  Pairs ``(p, n)`` are adjacent iff their
common zero set has at least ``thr`` rows and no third ray's zero set contains
it.  The blocker scan walks the shortest per-row incidence list.
"""

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


@njit(cache=True)
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True)
def adjacent_pairs(Z, P, N, thr, inc_ptr, inc_idx, nbits):
    """Return an (k, 2) array of adjacent (p, n) index pairs.

    ``inc_ptr``/``inc_idx`` is a CSR incidence list: rays zero on row ``b``
    are ``inc_idx[inc_ptr[b]:inc_ptr[b+1]]``.
    """
    W = Z.shape[1]
    cap = 1024
    out = np.empty((cap, 2), dtype=np.int64)
    cnt_out = 0
    common = np.empty(W, dtype=np.uint64)
    for a in range(P.shape[0]):
        i = P[a]
        for bb in range(N.shape[0]):
            j = N[bb]
            cnt = 0
            for w in range(W):
                c = Z[i, w] & Z[j, w]
                common[w] = c
                cnt += _popcount64(c)
            if cnt < thr:
                continue
            # rarest row in the common zero set
            best = -1
            best_len = 1 << 62
            for w in range(W):
                c = common[w]
                while c:
                    low = c & (~c + np.uint64(1))
                    bit = 0
                    t = low
                    while t > np.uint64(1):
                        t >>= np.uint64(1)
                        bit += 1
                    b = w * 64 + bit
                    if b < nbits:
                        ln = inc_ptr[b + 1] - inc_ptr[b]
                        if ln < best_len:
                            best_len = ln
                            best = b
                    c ^= low
            ok = True
            if best >= 0:
                for q in range(inc_ptr[best], inc_ptr[best + 1]):
                    r = inc_idx[q]
                    if r == i or r == j:
                        continue
                    sub = True
                    for w in range(W):
                        if (Z[r, w] & common[w]) != common[w]:
                            sub = False
                            break
                    if sub:
                        ok = False
                        break
            else:
                # empty common zero set: every other ray is a blocker
                if Z.shape[0] > 2:
                    ok = False
            if ok:
                if cnt_out == cap:
                    cap *= 2
                    new = np.empty((cap, 2), dtype=np.int64)
                    new[:cnt_out] = out[:cnt_out]
                    out = new
                out[cnt_out, 0] = i
                out[cnt_out, 1] = j
                cnt_out += 1
    return out[:cnt_out]


@njit(cache=True)
def popcounts(Z):
    k, W = Z.shape
    out = np.zeros(k, dtype=np.int64)
    for i in range(k):
        s = 0
        for w in range(W):
            s += _popcount64(Z[i, w])
        out[i] = s
    return out


def incidence_lists(Z: np.ndarray, nbits: int):
    """CSR lists of rays per zero bit."""
    k, W = Z.shape
    cols = []
    for b in range(nbits):
        w, s = divmod(b, 64)
        cols.append(np.flatnonzero((Z[:, w] >> np.uint64(s)) & np.uint64(1)))
    ptr = np.zeros(nbits + 1, dtype=np.int64)
    for b, c in enumerate(cols):
        ptr[b + 1] = ptr[b] + len(c)
    idx = np.concatenate(cols).astype(np.int64) if cols else np.zeros(0, dtype=np.int64)
    return ptr, idx
