"""Compiled inner loops.

Bitsets are little-endian arrays of uint64 words: bit ``r`` lives in word
``r >> 6`` at position ``r & 63``.  Every kernel releases the GIL so callers
can fan work out over threads.
"""

import numpy as np
from numba import njit, types
from numba.extending import intrinsic

ONE = np.uint64(1)
ZERO = np.uint64(0)
ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


@intrinsic
def popcount64(typingctx, x):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        return builder.ctpop(args[0])

    return sig, codegen


@njit(cache=True, nogil=True)
def cell_points(q, n, pivots, free_t, free_c, x0, count, coeffs, add_t, mul_t, out):
    """Point codes of ``count`` consecutive subspaces of one Schubert cell.

    Row ``r`` of ``out`` receives, for each normalized coefficient vector, the
    code sum(v_j * q**(n-1-j)) of the corresponding vector of the span.
    """
    k = pivots.shape[0]
    nfree = free_t.shape[0]
    npts = coeffs.shape[0]
    mat = np.zeros((k, n), dtype=np.int64)
    digits = np.zeros(nfree, dtype=np.int64)
    x = x0
    for f in range(nfree - 1, -1, -1):
        digits[f] = x % q
        x //= q
    for t in range(k):
        mat[t, pivots[t]] = 1
    for r in range(count):
        for f in range(nfree):
            mat[free_t[f], free_c[f]] = digits[f]
        for p in range(npts):
            code = 0
            for j in range(n):
                v = 0
                for t in range(k):
                    c = coeffs[p, t]
                    if c != 0:
                        e = mat[t, j]
                        if e != 0:
                            v = add_t[v, mul_t[c, e]]
                code = code * q + v
            out[r, p] = code
        f = nfree - 1
        while f >= 0:
            digits[f] += 1
            if digits[f] < q:
                break
            digits[f] = 0
            f -= 1


@njit(cache=True, nogil=True)
def build_columns(row_pts, col_pts, col_idx, ncodes, target, out):
    """Set bit r of ``out[c]`` iff row r shares exactly ``target`` points with column c."""
    mem = np.zeros(ncodes, dtype=np.uint8)
    nrows, rp = row_pts.shape
    cp = col_pts.shape[1]
    for ci in range(col_idx.shape[0]):
        c = col_idx[ci]
        for t in range(cp):
            mem[col_pts[c, t]] = 1
        for r in range(nrows):
            cnt = 0
            for t in range(rp):
                cnt += mem[row_pts[r, t]]
            if cnt == target:
                out[c, r >> 6] |= ONE << np.uint64(r & 63)
        for t in range(cp):
            mem[col_pts[c, t]] = 0


@njit(cache=True, nogil=True)
def private_count(cols, c, covers):
    w = cols.shape[1]
    total = 0
    for x in range(w):
        u = ZERO
        for j in range(covers.shape[0]):
            u |= cols[covers[j], x]
        total += popcount64(cols[c, x] & ~u)
    return total


@njit(cache=True, nogil=True)
def private_counts(cols, cs, covers):
    out = np.empty(cs.shape[0], dtype=np.int64)
    for t in range(cs.shape[0]):
        out[t] = private_count(cols, cs[t], covers[t])
    return out


@njit(cache=True, nogil=True)
def exhaustive_min(cols, s, col_list, best, wit):
    """Minimum private count of each listed column over all s-subsets of the others.

    Covering subsets are visited in lexicographic order and the first one
    attaining the minimum is kept in ``wit``.  A column stops early once its
    minimum reaches zero.
    """
    ncols, w = cols.shape
    m = ncols - 1
    others = np.empty(m, dtype=np.int64)
    idx = np.empty(max(s, 1), dtype=np.int64)
    union = np.zeros((s + 1, w), dtype=np.uint64)
    for li in range(col_list.shape[0]):
        c = col_list[li]
        pos = 0
        for j in range(ncols):
            if j != c:
                others[pos] = j
                pos += 1
        cur = -1
        for lvl in range(s):
            idx[lvl] = lvl
            for x in range(w):
                union[lvl + 1, x] = union[lvl, x] | cols[others[lvl], x]
        while True:
            cnt = 0
            for x in range(w):
                cnt += popcount64(cols[c, x] & ~union[s, x])
            if cur < 0 or cnt < cur:
                cur = cnt
                for lvl in range(s):
                    wit[li, lvl] = others[idx[lvl]]
                if cur == 0:
                    break
            lvl = s - 1
            while lvl >= 0 and idx[lvl] == m - s + lvl:
                lvl -= 1
            if lvl < 0:
                break
            idx[lvl] += 1
            for x in range(w):
                union[lvl + 1, x] = union[lvl, x] | cols[others[idx[lvl]], x]
            for l2 in range(lvl + 1, s):
                idx[l2] = idx[l2 - 1] + 1
                for x in range(w):
                    union[l2 + 1, x] = union[l2, x] | cols[others[idx[l2]], x]
        best[li] = cur


@njit(cache=True, nogil=True)
def stream_private(row_pts, mem, target, nbits, blocks, acc):
    """Bit-sliced private counts for 64 tuples per block.

    ``mem[block, role, code]`` has bit ``l`` set when point ``code`` lies in the
    column playing ``role`` (0 = candidate, 1.. = covers) for lane ``l``.  For
    each row the per-lane count of shared points is kept in ``nbits`` vertical
    bit planes and compared with ``target``; lanes where the candidate column
    hits and no cover does are added to the vertical accumulator ``acc[block]``.
    """
    nrows, npts = row_pts.shape
    nroles = mem.shape[1]
    accbits = acc.shape[1]
    planes = np.empty(nbits, dtype=np.uint64)
    for bi in range(blocks.shape[0]):
        b = blocks[bi]
        m = mem[b]
        a = acc[b]
        for r in range(nrows):
            priv = ZERO
            for role in range(nroles):
                for t in range(nbits):
                    planes[t] = ZERO
                for p in range(npts):
                    # ripple-carry add of one bit per lane; counts never exceed npts
                    carry = m[role, row_pts[r, p]]
                    for t in range(nbits):
                        nxt = planes[t] & carry
                        planes[t] ^= carry
                        carry = nxt
                eq = ALL
                for t in range(nbits):
                    if (target >> t) & 1:
                        eq &= planes[t]
                    else:
                        eq &= ~planes[t]
                if role == 0:
                    priv = eq
                else:
                    priv &= ~eq
                if priv == ZERO:
                    break
            carry = priv
            t = 0
            while carry != ZERO and t < accbits:
                nxt = a[t] & carry
                a[t] ^= carry
                carry = nxt
                t += 1


@njit(cache=True, nogil=True)
def stream_private_rows(row_pts, mem, target, nbits, block, lane, first_rank, out, nout):
    """Collect ranks of rows private to one lane, up to ``out.shape[0]`` of them."""
    nrows, npts = row_pts.shape
    nroles = mem.shape[1]
    bit = ONE << np.uint64(lane)
    for r in range(nrows):
        if nout >= out.shape[0]:
            return nout
        private = True
        for role in range(nroles):
            cnt = 0
            for p in range(npts):
                if mem[block, role, row_pts[r, p]] & bit:
                    cnt += 1
            hit = cnt == target
            if role == 0 and not hit:
                private = False
                break
            if role > 0 and hit:
                private = False
                break
        if private:
            out[nout] = first_rank + r
            nout += 1
    return nout
