"""Compiled GRAND query loop.

Mirrors the enumeration order of :class:`btt_grand.patterns.PatternStream`
with an explicit depth-first walk instead of nested generators.  Sub-effects
are advanced with an in-place lexicographic successor on ascending tuples of
distinct parts.

Layout of the inputs (``K`` segments, in walk order: non-chosen then chosen):

- ``colsyn``: uint64 (n, nw), syndrome of each column.
- ``seg_len``, ``seg_off``: int64 (K,), length and offset into ``orders``.
- ``seg_row``: int64 (K,), constraint row of a chosen segment or -1.
- ``rel``: int64 (K, R), walk depths of the non-chosen segments in that
  row's relation, padded with -1.
- ``orders``: int64 (B, n), per frame the columns of each segment sorted by
  reliability, concatenated in walk order.
- ``lo_tab``, ``hi_tab``: int64 (K + 1, n + 1), least and greatest total
  weight that segments ``d..`` can carry with ``q`` flips (see
  :func:`btt_grand.patterns.weight_bounds`); infeasible entries have
  ``lo > hi``.
- ``target``: uint64 (B, nw), syndrome of the hard decision.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _fill(parts, start, prev, remaining, count, limit):
    # lexicographically smallest ascending completion; False if none exists
    for j in range(count):
        after = count - j - 1
        max_rest = after * limit - after * (after - 1) // 2
        c = max(prev + 1, remaining - max_rest)
        if c + after > limit:
            return False
        if c + after * c + after * (after + 1) // 2 > remaining:
            return False
        parts[start + j] = c
        remaining -= c
        prev = c
    return remaining == 0


@njit(cache=True, nogil=True)
def _successor(parts, count, total, limit):
    for i in range(count - 2, -1, -1):
        prefix = 0
        for j in range(i):
            prefix += parts[j]
        b = parts[i] + 1
        after = count - 1 - i
        if b + after > limit:
            continue
        if _fill(parts, i + 1, b, total - prefix - b, after, limit):
            parts[i] = b
            return True
    return False


@njit(cache=True, nogil=True)
def _fits(lo_tab, hi_tab, d, rem_w, rem_p):
    if rem_p < 0 or rem_p >= lo_tab.shape[1]:
        return False
    return lo_tab[d, rem_p] <= rem_w <= hi_tab[d, rem_p]


@njit(cache=True, nogil=True)
def _advance(d, fresh, last, w, p, parts, need, rem_w, rem_p, seg_len, lo_tab, hi_tab,
             first, syn, seg_row, rel):
    # moves depth d to its next (weight, flips, sub-effect); False when spent.
    # first is the depth of the first chosen segment
    limit = seg_len[d]
    if d == last:
        # the last segment takes whatever weight and flips remain
        if not fresh:
            return p[d] > 0 and _successor(parts[d], p[d], w[d], limit)
        w[d] = rem_w[d]
        p[d] = rem_p[d]
        if need[d] >= 0 and (p[d] & 1) != need[d]:
            return False
        if p[d] == 0:
            return w[d] == 0
        if p[d] > limit:
            return False
        return _fill(parts[d], 0, 0, w[d], p[d], limit)
    if fresh:
        w[d] = 0
        p[d] = 0
    else:
        if p[d] > 0 and _successor(parts[d], p[d], w[d], limit):
            return True
        p[d] += 1
    cap = limit * (limit + 1) // 2
    while w[d] <= min(rem_w[d], cap):
        while p[d] <= min(rem_p[d], limit) and p[d] * (p[d] + 1) // 2 <= w[d]:
            q = p[d]
            ok = need[d] < 0 or (q & 1) == need[d]
            if ok and d + 1 >= first and first <= last:
                ok = _chosen_ok(d, q, first, syn, seg_row, rel, p, rem_p)
            if ok and _fits(lo_tab, hi_tab, d + 1, rem_w[d] - w[d], rem_p[d] - q):
                if q == 0:
                    if w[d] == 0:
                        return True
                elif _fill(parts[d], 0, 0, w[d], q, limit):
                    return True
            p[d] += 1
        # jump to the least larger weight that some flip count can take
        nxt = rem_w[d] + 1
        for q in range(min(rem_p[d], limit) + 1):
            if need[d] >= 0 and (q & 1) != need[d]:
                continue
            r = rem_p[d] - q
            if r >= lo_tab.shape[1] or hi_tab[d + 1, r] < 0:
                continue
            a = max(q * (q + 1) // 2, rem_w[d] - hi_tab[d + 1, r], w[d] + 1)
            b = min(q * limit - q * (q - 1) // 2, rem_w[d] - lo_tab[d + 1, r])
            if a <= b and a < nxt:
                nxt = a
        w[d] = nxt
        p[d] = 0
    return False


@njit(cache=True, nogil=True)
def _chosen_ok(d, q, first, syn, seg_row, rel, p, rem_p):
    # once non-chosen parities are all fixed, the chosen segments after d need
    # known parities; their flips must cover the odd ones with even slack
    ones = 0
    for j in range(max(d + 1, first), seg_row.shape[0]):
        row = seg_row[j]
        nb = np.int64((syn[row >> 6] >> np.uint64(row & 63)) & np.uint64(1))
        for r in range(rel.shape[1]):
            v = rel[j, r]
            if v < 0:
                break
            nb ^= q & 1 if v == d else p[v] & 1
        ones += nb
    left = rem_p[d] - q
    return left >= ones and ((left - ones) & 1) == 0


@njit(cache=True, nogil=True)
def decode_batch(colsyn, seg_len, seg_off, seg_row, rel, lo_tab, hi_tab, orders, target,
                 max_queries, queries, found, noise):
    nframes, n = orders.shape
    nw = colsyn.shape[1]
    K = seg_len.shape[0]
    last = K - 1
    max_total = 0
    for q in range(lo_tab.shape[1]):
        if hi_tab[0, q] > max_total:
            max_total = hi_tab[0, q]
    maxp = 1
    for d in range(K):
        maxp = max(maxp, seg_len[d])

    w = np.zeros(K, dtype=np.int64)
    p = np.zeros(K, dtype=np.int64)
    parts = np.zeros((K, maxp + 1), dtype=np.int64)
    need = np.full(K, -1, dtype=np.int64)
    rem_w = np.zeros(K, dtype=np.int64)
    rem_p = np.zeros(K, dtype=np.int64)
    acc = np.zeros((K + 1, nw), dtype=np.uint64)
    first = K
    while first > 0 and seg_row[first - 1] >= 0:
        first -= 1

    for f in range(nframes):
        q = 0
        hit = False
        for j in range(n):
            noise[f, j] = 0
        total = 0
        while total <= max_total and not hit and q < max_queries:
            for flips in range(lo_tab.shape[1]):
                if hit or q >= max_queries:
                    break
                if not _fits(lo_tab, hi_tab, 0, total, flips):
                    continue
                d = 0
                rem_w[0] = total
                rem_p[0] = flips
                need[0] = -1
                if seg_row[0] >= 0:
                    need[0] = np.int64((target[f, seg_row[0] >> 6] >> np.uint64(seg_row[0] & 63))
                                       & np.uint64(1))
                ok = _advance(0, True, last, w, p, parts, need, rem_w, rem_p, seg_len, lo_tab, hi_tab, first, target[f], seg_row, rel)
                while True:
                    if not ok:
                        if d == 0:
                            break
                        d -= 1
                        ok = _advance(d, False, last, w, p, parts, need, rem_w, rem_p, seg_len,
                                      lo_tab, hi_tab, first, target[f], seg_row, rel)
                        continue
                    for b in range(nw):
                        acc[d + 1, b] = acc[d, b]
                    base = seg_off[d]
                    for t in range(p[d]):
                        col = orders[f, base + parts[d, t] - 1]
                        for b in range(nw):
                            acc[d + 1, b] ^= colsyn[col, b]
                    if d == last:
                        q += 1
                        same = True
                        for b in range(nw):
                            if acc[K, b] != target[f, b]:
                                same = False
                                break
                        if same:
                            hit = True
                            for dd in range(K):
                                for t in range(p[dd]):
                                    noise[f, orders[f, seg_off[dd] + parts[dd, t] - 1]] = 1
                            break
                        if q >= max_queries:
                            break
                        ok = _advance(d, False, last, w, p, parts, need, rem_w, rem_p, seg_len,
                                      lo_tab, hi_tab, first, target[f], seg_row, rel)
                    else:
                        d += 1
                        rem_w[d] = rem_w[d - 1] - w[d - 1]
                        rem_p[d] = rem_p[d - 1] - p[d - 1]
                        need[d] = -1
                        row = seg_row[d]
                        if row >= 0:
                            nb = np.int64((target[f, row >> 6] >> np.uint64(row & 63)) & np.uint64(1))
                            for r in range(rel.shape[1]):
                                v = rel[d, r]
                                if v < 0:
                                    break
                                nb ^= p[v] & 1
                            need[d] = nb
                        ok = _advance(d, True, last, w, p, parts, need, rem_w, rem_p, seg_len,
                                      lo_tab, hi_tab, first, target[f], seg_row, rel)
            total += 1
        queries[f] = q
        found[f] = hit
