"""Hot integer loops, each in two flavours.

Every kernel exists as ``_name_nb`` (plain loops, compiled with numba when it
is importable) and ``_name_np`` (vectorised numpy, or plain Python where the
algorithm is inherently sequential).  The public name binds to one of them at
import time:

    VGLCS_DISABLE_NUMBA=1   force the numpy path even if numba is installed

Both flavours return identical arrays; ``tests/test_kernels.py`` checks this
and ``benchmarks/bench_backends.py`` times them against each other.

Array conventions shared by all kernels (positions are 1-based):

    codes  (m, n+2) int32   letter index of s_i[j] for 1 <= j <= |s_i|, else -1
    gaps   (m, n+2) int64   G_i(j) for 1 <= j <= |s_i|, else 0
    lens   (m,)     int64   |s_i|
"""

from __future__ import annotations

import os
from bisect import bisect_left

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

ENV_FLAG = "VGLCS_DISABLE_NUMBA"

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get(ENV_FLAG, "").strip().lower() not in {
    "1",
    "true",
    "yes",
    "on",
}


def _njit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# Successor tables
# --------------------------------------------------------------------------


@_njit
def _succ_nb(codes, gaps, lens, sigma):
    m, width = codes.shape
    out = np.full((m, width, sigma), -1, np.int32)
    for i in range(m):
        n_i = lens[i]
        gmax = 0
        for q in range(1, n_i + 1):
            if gaps[i, q] > gmax:
                gmax = gaps[i, q]
        for j in range(1, n_i + 2):
            stop = min(n_i, j + gmax)
            for q in range(j, stop + 1):
                a = codes[i, q]
                if out[i, j, a] == -1 and q - j <= gaps[i, q]:
                    out[i, j, a] = q
    return out


def _succ_np(codes, gaps, lens, sigma):
    m, width = codes.shape
    out = np.full((m, width, sigma), -1, np.int32)
    j = np.arange(width)
    gmax = int(gaps.max()) if gaps.size else 0
    for d in range(gmax + 1):
        q = np.minimum(j + d, width - 1)
        a = codes[:, q]
        ok = (j >= 1) & (j + d <= lens[:, None]) & (d <= gaps[:, q])
        ii, jj = np.nonzero(ok)
        aa = a[ii, jj]
        free = out[ii, jj, aa] == -1
        out[ii[free], jj[free], aa[free]] = jj[free] + d
    return out


@_njit
def _plain_next_nb(codes, lens, sigma):
    m, width = codes.shape
    out = np.full((m, width, sigma), -1, np.int32)
    for i in range(m):
        for j in range(lens[i], 0, -1):
            for a in range(sigma):
                out[i, j, a] = out[i, j + 1, a]
            out[i, j, codes[i, j]] = j
    return out


def _plain_next_np(codes, lens, sigma):
    m, width = codes.shape
    big = np.iinfo(np.int32).max
    idx = np.arange(width, dtype=np.int32)
    out = np.empty((m, width, sigma), np.int32)
    for a in range(sigma):
        hit = np.where(codes == a, idx, big)
        nxt = np.minimum.accumulate(hit[:, ::-1], axis=1)[:, ::-1]
        out[:, :, a] = np.where(nxt == big, -1, nxt)
    out[:, 0, :] = -1
    return out


# --------------------------------------------------------------------------
# Beam level expansion
# --------------------------------------------------------------------------


@_njit
def _expand_nb(pos, succ, dominance):
    n_rows, m = pos.shape
    sigma = succ.shape[2]
    cap = n_rows * sigma
    child = np.empty((cap, m), np.int32)
    parent = np.empty(cap, np.int32)
    letter = np.empty(cap, np.int32)
    n_raw = np.zeros(n_rows, np.int32)
    cand = np.empty((sigma, m), np.int32)
    ok = np.empty(sigma, np.bool_)
    c = 0
    for b in range(n_rows):
        for a in range(sigma):
            good = True
            for i in range(m):
                q = succ[i, pos[b, i], a]
                if q < 0:
                    good = False
                    break
                cand[a, i] = q + 1
            ok[a] = good
            if good:
                n_raw[b] += 1
        for a in range(sigma):
            if not ok[a]:
                continue
            if dominance:
                beaten = False
                for d in range(sigma):
                    if d == a or not ok[d]:
                        continue
                    le = True
                    eq = True
                    for i in range(m):
                        if cand[d, i] > cand[a, i]:
                            le = False
                            break
                        if cand[d, i] != cand[a, i]:
                            eq = False
                    if le and (not eq or d < a):
                        beaten = True
                        break
                if beaten:
                    continue
            for i in range(m):
                child[c, i] = cand[a, i]
            parent[c] = b
            letter[c] = a
            c += 1
    return child[:c], parent[:c], letter[:c], n_raw


def _expand_np(pos, succ, dominance, chunk=4096):
    n_rows, m = pos.shape
    sigma = succ.shape[2]
    if n_rows > chunk:
        parts = [
            _expand_np(pos[s : s + chunk], succ, dominance, chunk)
            for s in range(0, n_rows, chunk)
        ]
        offsets = np.cumsum([0] + [min(chunk, n_rows - s) for s in range(0, n_rows, chunk)])
        return (
            np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] + o for p, o in zip(parts, offsets)]).astype(np.int32),
            np.concatenate([p[2] for p in parts]),
            np.concatenate([p[3] for p in parts]),
        )
    q = succ[np.arange(m)[None, :], pos].transpose(0, 2, 1)  # (rows, sigma, m)
    ok = (q >= 0).all(axis=2)
    keep = ok
    if dominance and sigma > 1:
        le = (q[:, :, None, :] <= q[:, None, :, :]).all(axis=3)
        eq = (q[:, :, None, :] == q[:, None, :, :]).all(axis=3)
        d = np.arange(sigma)
        earlier = d[:, None] < d[None, :]
        beats = le & (~eq | earlier) & ok[:, :, None]
        beats[:, d, d] = False
        keep = ok & ~beats.any(axis=1)
    b_idx, a_idx = np.nonzero(keep)
    child = (q[b_idx, a_idx] + 1).astype(np.int32).reshape(-1, m)
    return child, b_idx.astype(np.int32), a_idx.astype(np.int32), ok.sum(axis=1).astype(np.int32)


@_njit
def _dedup_nb(rows):
    n_rows, w = rows.shape
    size = 2
    while size < 2 * n_rows:
        size *= 2
    mask = size - 1
    table = np.full(size, -1, np.int64)
    keep = np.empty(n_rows, np.int64)
    k = 0
    for r in range(n_rows):
        h = np.uint64(14695981039346656037)
        for t in range(w):
            h = (h ^ np.uint64(rows[r, t])) * np.uint64(1099511628211)
        slot = np.int64(h & np.uint64(mask))
        while True:
            o = table[slot]
            if o == -1:
                table[slot] = r
                keep[k] = r
                k += 1
                break
            same = True
            for t in range(w):
                if rows[o, t] != rows[r, t]:
                    same = False
                    break
            if same:
                break
            slot = (slot + 1) & mask
    return keep[:k]


def _dedup_np(rows):
    if len(rows) == 0:
        return np.zeros(0, np.int64)
    _, first = np.unique(np.ascontiguousarray(rows), axis=0, return_index=True)
    return np.sort(first).astype(np.int64)


# --------------------------------------------------------------------------
# m = 2 dynamic programming over the match lattice
# --------------------------------------------------------------------------


@_njit
def _dp_basic_nb(c1, c2, g1, g2, n1, n2):
    val = np.zeros((n1 + 1, n2 + 1), np.int32)
    pi = np.zeros((n1 + 1, n2 + 1), np.int32)
    pj = np.zeros((n1 + 1, n2 + 1), np.int32)
    for i in range(1, n1 + 1):
        lo_i = max(1, i - g1[i] - 1)
        for j in range(1, n2 + 1):
            if c1[i] != c2[j]:
                continue
            lo_j = max(1, j - g2[j] - 1)
            best = 0
            bi = 0
            bj = 0
            for a in range(lo_i, i):
                for b in range(lo_j, j):
                    if val[a, b] > best:
                        best = val[a, b]
                        bi = a
                        bj = b
            val[i, j] = best + 1
            pi[i, j] = bi
            pj[i, j] = bj
    return val, pi, pj


def _dp_basic_np(c1, c2, g1, g2, n1, n2):
    # Rectangle maxima one row at a time; keys pack (value, -row, -col) so a
    # single max picks the smallest predecessor among maximisers.
    val = np.zeros((n1 + 1, n2 + 1), np.int32)
    pi = np.zeros((n1 + 1, n2 + 1), np.int32)
    pj = np.zeros((n1 + 1, n2 + 1), np.int32)
    width = n2 + 1
    big = np.int64((n1 + 1) * width + 1)
    cell = np.arange(n1 + 1, dtype=np.int64)[:, None] * width + np.arange(width, dtype=np.int64)
    key = big - 1 - cell  # value 0 everywhere yet
    cols = np.arange(width)
    g2max = int(g2[1 : n2 + 1].max()) if n2 else 0
    for i in range(1, n1 + 1):
        match = c2[: n2 + 1] == c1[i]
        match[0] = False
        if not match.any():
            continue
        lo_i = max(1, i - int(g1[i]) - 1)
        if lo_i < i:
            colbest = key[lo_i:i].max(axis=0)
        else:
            colbest = np.full(width, -1, np.int64)
        colbest[0] = -1
        best = np.full(width, -1, np.int64)
        for d in range(1, g2max + 2):
            src = cols - d
            ok = (src >= 1) & (d <= g2[: n2 + 1] + 1)
            cand = np.where(ok, colbest[np.maximum(src, 0)], -1)
            np.maximum(best, cand, out=best)
        has = match & (best >= 0) & (best // big > 0)
        v = np.where(has, best // big, 0)
        c = np.where(has, big - 1 - best % big, 0)
        val[i, match] = (v + 1)[match]
        pi[i, match] = (c // width)[match]
        pj[i, match] = (c % width)[match]
        key[i, match] = val[i, match].astype(np.int64) * big + (big - 1 - cell[i, match])
    return val, pi, pj


@_njit
def _dp_ismq_nb(c1, c2, g1, g2, n1, n2):
    val = np.zeros((n1 + 1, n2 + 1), np.int32)
    pi = np.zeros((n1 + 1, n2 + 1), np.int32)
    pj = np.zeros((n1 + 1, n2 + 1), np.int32)
    # one monotone stack per column over rows, values strictly decreasing
    cs_row = np.empty((n2 + 1, n1 + 1), np.int32)
    cs_val = np.empty((n2 + 1, n1 + 1), np.int32)
    cs_len = np.zeros(n2 + 1, np.int32)
    cb_val = np.zeros(n2 + 1, np.int32)
    cb_row = np.zeros(n2 + 1, np.int32)
    rs_col = np.empty(n2 + 1, np.int32)
    rs_val = np.empty(n2 + 1, np.int32)
    rs_row = np.empty(n2 + 1, np.int32)
    for i in range(1, n1 + 1):
        lo_r = max(1, i - g1[i] - 1)
        for jp in range(1, n2 + 1):
            cnt = cs_len[jp]
            lo = 0
            hi = cnt
            while lo < hi:
                mid = (lo + hi) // 2
                if cs_row[jp, mid] < lo_r:
                    lo = mid + 1
                else:
                    hi = mid
            if lo < cnt:
                cb_val[jp] = cs_val[jp, lo]
                cb_row[jp] = cs_row[jp, lo]
            else:
                cb_val[jp] = 0
        top = 0
        for j in range(1, n2 + 1):
            if j >= 2 and cb_val[j - 1] > 0:
                v = cb_val[j - 1]
                while top > 0 and rs_val[top - 1] <= v:
                    top -= 1
                rs_col[top] = j - 1
                rs_val[top] = v
                rs_row[top] = cb_row[j - 1]
                top += 1
            if c1[i] != c2[j]:
                continue
            lo_c = max(1, j - g2[j] - 1)
            lo = 0
            hi = top
            while lo < hi:
                mid = (lo + hi) // 2
                if rs_col[mid] < lo_c:
                    lo = mid + 1
                else:
                    hi = mid
            if lo < top:
                val[i, j] = rs_val[lo] + 1
                pi[i, j] = rs_row[lo]
                pj[i, j] = rs_col[lo]
            else:
                val[i, j] = 1
        for j in range(1, n2 + 1):
            v = val[i, j]
            if v == 0:
                continue
            t = cs_len[j]
            while t > 0 and cs_val[j, t - 1] <= v:
                t -= 1
            cs_row[j, t] = i
            cs_val[j, t] = v
            cs_len[j] = t + 1
    return val, pi, pj


def _dp_ismq_np(c1, c2, g1, g2, n1, n2, debug=False):
    """Sequential fallback of the ISMQ sweep (lists + bisect).

    With ``debug`` every window answer is checked against a naive maximum.
    """
    val = np.zeros((n1 + 1, n2 + 1), np.int32)
    pi = np.zeros((n1 + 1, n2 + 1), np.int32)
    pj = np.zeros((n1 + 1, n2 + 1), np.int32)
    c1l = c1.tolist()
    c2l = c2.tolist()
    g1l = g1.tolist()
    g2l = g2.tolist()
    cs_row = [[] for _ in range(n2 + 1)]
    cs_val = [[] for _ in range(n2 + 1)]
    rows = val.tolist()  # working copy, kept in sync with ``val``
    for i in range(1, n1 + 1):
        ci = c1l[i]
        if ci not in c2l[1 : n2 + 1]:
            continue
        lo_r = max(1, i - g1l[i] - 1)
        cb_val = [0] * (n2 + 1)
        cb_row = [0] * (n2 + 1)
        for jp in range(1, n2 + 1):
            r = cs_row[jp]
            k = bisect_left(r, lo_r)
            if k < len(r):
                cb_val[jp] = cs_val[jp][k]
                cb_row[jp] = r[k]
            if debug:
                naive = max((rows[a][jp] for a in range(lo_r, i)), default=0)
                assert naive == cb_val[jp], "column window maximum mismatch"
        rs_col, rs_val, rs_row = [], [], []
        row_i = rows[i]
        for j in range(1, n2 + 1):
            if j >= 2 and cb_val[j - 1] > 0:
                v = cb_val[j - 1]
                while rs_val and rs_val[-1] <= v:
                    rs_col.pop()
                    rs_val.pop()
                    rs_row.pop()
                rs_col.append(j - 1)
                rs_val.append(v)
                rs_row.append(cb_row[j - 1])
            if c2l[j] != ci:
                continue
            lo_c = max(1, j - g2l[j] - 1)
            k = bisect_left(rs_col, lo_c)
            if debug:
                naive = max((cb_val[b] for b in range(lo_c, j)), default=0)
                got = rs_val[k] if k < len(rs_col) else 0
                assert naive == got, "row window maximum mismatch"
            if k < len(rs_col):
                row_i[j] = rs_val[k] + 1
                pi[i, j] = rs_row[k]
                pj[i, j] = rs_col[k]
            else:
                row_i[j] = 1
        for j in range(1, n2 + 1):
            v = row_i[j]
            if v == 0:
                continue
            r, vs = cs_row[j], cs_val[j]
            while vs and vs[-1] <= v:
                vs.pop()
                r.pop()
            r.append(i)
            vs.append(v)
        val[i] = row_i
    return val, pi, pj


# --------------------------------------------------------------------------
# Dispatch
# --------------------------------------------------------------------------

if USE_NUMBA:
    succ_table = _succ_nb
    plain_next_table = _plain_next_nb
    expand_level = _expand_nb
    dedup_rows = _dedup_nb
    dp_basic_table = _dp_basic_nb
    dp_ismq_table = _dp_ismq_nb
else:
    succ_table = _succ_np
    plain_next_table = _plain_next_np
    expand_level = _expand_np
    dedup_rows = _dedup_np
    dp_basic_table = _dp_basic_np
    dp_ismq_table = _dp_ismq_np
