"""Noise-effect enumeration in ORBGRAND order, optionally segmented.

A pattern's pseudo-weight is the sum of the reliability ranks of its flipped
bits (rank 1 = least reliable).  Patterns of pseudo-weight ``w`` that flip
``p`` bits correspond to partitions of ``w`` into ``p`` distinct parts, so the
plain stream walks weight levels ``w = 0, 1, 2, ...`` and, inside a level,
partitions by number of parts and then lexicographically.

The segmented stream ranks bits inside each segment and uses the sum of
within-segment ranks as the weight.  A weight level is split by total number
of flipped bits, fewest first.  Inside that it walks the non-chosen segments
first and the chosen segments last, so each chosen segment's parity is
already fixed by the syndrome when it is reached; per segment, sub-effects go
by weight, then flips, then lexicographically.  Only patterns meeting the
first ``ell`` syndrome constraints are produced.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .constraints import SegmentationScheme, unsegmented
from .errors import ShapeError
from .gf2 import BitVector


def distinct_parts(total: int, count: int, lo: int, hi: int) -> Iterator[tuple[int, ...]]:
    """Ascending tuples of ``count`` distinct integers in ``[lo, hi]`` summing
    to ``total``, in lexicographic order."""
    if count == 0:
        if total == 0:
            yield ()
        return
    top = count - 1
    max_rest = top * hi - top * (top - 1) // 2
    for a in range(lo, hi - top + 1):
        if a + top * a + top * (top + 1) // 2 > total:
            break
        if a + max_rest < total:
            continue
        for tail in distinct_parts(total - a, top, a + 1, hi):
            yield (a,) + tail


def sub_effects(length: int, weight: int, parity: int | None = None) -> Iterator[tuple[int, ...]]:
    """Rank tuples of pseudo-weight ``weight`` on a segment of ``length`` bits,
    by number of flipped bits then lexicographically.  With ``parity`` set,
    only tuples whose size has that parity."""
    p = 0
    while p <= length and p * (p + 1) // 2 <= weight:
        if parity is None or p % 2 == parity:
            yield from distinct_parts(weight, p, 1, length)
        p += 1


def max_weight(length: int) -> int:
    return length * (length + 1) // 2


def weight_bounds(lengths: Sequence[int]) -> tuple[list[list[int]], list[list[int]]]:
    """Smallest and largest total pseudo-weight for ``q`` flips spread over
    segments ``d, d+1, ...``: ``lo[d][q]`` and ``hi[d][q]``.

    Row ``len(lengths)`` is the empty suffix, which only admits ``q = 0``.
    """
    k = len(lengths)
    big = 1 << 62
    lo = [[0]]
    hi = [[0]]
    for d in range(k - 1, -1, -1):
        length = lengths[d]
        nxt_lo, nxt_hi = lo[0], hi[0]
        size = len(nxt_lo) + length
        cur_lo = [big] * size
        cur_hi = [-1] * size
        for p in range(length + 1):
            least = p * (p + 1) // 2
            most = p * length - p * (p - 1) // 2
            for q, (a, b) in enumerate(zip(nxt_lo, nxt_hi)):
                cur_lo[p + q] = min(cur_lo[p + q], least + a)
                cur_hi[p + q] = max(cur_hi[p + q], most + b)
        lo.insert(0, cur_lo)
        hi.insert(0, cur_hi)
    return lo, hi


@dataclass(frozen=True)
class RankPermutation:
    """Reliability ranks of one received frame.

    ``global_rank[i]`` is the 1-based rank of bit ``i`` among all bits;
    ``segment_rank[i]`` its rank within its segment.  ``segment_order[s][r]``
    is the column holding within-segment rank ``r + 1`` in segment ``s``.
    Ties in reliability go to the lower position.
    """

    global_rank: np.ndarray
    segment_rank: np.ndarray
    segment_order: tuple[np.ndarray, ...]
    scheme: SegmentationScheme

    @classmethod
    def from_reliabilities(cls, gamma, scheme: SegmentationScheme | None = None) -> "RankPermutation":
        gamma = np.asarray(gamma, dtype=np.float64)
        n = gamma.size
        if scheme is None:
            scheme = unsegmented(n)
        if scheme.n != n:
            raise ShapeError(f"scheme covers {scheme.n} bits, frame has {n}")
        global_rank = np.empty(n, dtype=np.int64)
        global_rank[np.argsort(gamma, kind="stable")] = np.arange(1, n + 1)
        segment_rank = np.empty(n, dtype=np.int64)
        orders = []
        for leaf in scheme.segments:
            local = np.argsort(gamma[leaf.lo:leaf.hi], kind="stable")
            order = leaf.lo + local
            segment_rank[order] = np.arange(1, leaf.size + 1)
            orders.append(order)
        return cls(global_rank, segment_rank, tuple(orders), scheme)

    @property
    def n(self) -> int:
        return int(self.global_rank.size)


def pseudo_weight(z: BitVector, ranks: RankPermutation, mode: str = "plain") -> int:
    """Sum of global (``plain``) or within-segment (``segmented``) ranks of the
    flipped bits of ``z``."""
    if z.len != ranks.n:
        raise ShapeError(f"pattern length {z.len} != {ranks.n}")
    idx = z.indices()
    if mode == "plain":
        return int(ranks.global_rank[idx].sum())
    if mode == "segmented":
        return int(ranks.segment_rank[idx].sum())
    raise ValueError(f"unknown mode {mode!r}")


class SubEffectStream:
    """Sub-effects of one segment with a fixed weight parity, in
    non-decreasing within-segment pseudo-weight.

    ``order[r]`` is the segment-local position with within-segment rank
    ``r + 1``; yielded vectors are in segment-local coordinates.
    """

    def __init__(self, order: Sequence[int], parity: int):
        self.order = np.asarray(order, dtype=np.int64)
        self.parity = parity & 1
        self._it = self._generate()

    def _generate(self):
        length = self.order.size
        for w in range(max_weight(length) + 1):
            for parts in sub_effects(length, w, self.parity):
                yield BitVector.from_indices(length, self.order[np.array(parts, dtype=np.int64) - 1])

    def __iter__(self):
        return self

    def __next__(self) -> BitVector:
        return next(self._it)


def constrained_sub_next(substream: SubEffectStream) -> BitVector | None:
    """Next sub-effect, or None once exhausted."""
    return next(substream, None)


class PatternStream:
    """Noise effects in non-decreasing pseudo-weight.

    Plain mode (``scheme`` None or ``ell == 0``) yields all ``2**n`` patterns
    in ORBGRAND order.  Segmented mode yields exactly the ``2**(n - ell)``
    patterns ``z`` whose first ``ell`` syndrome bits match ``syndrome``.

    Iterating yields :class:`BitVector` objects; :meth:`positions` yields
    ``(pseudo_weight, flipped_columns)`` pairs, which is cheaper.
    """

    def __init__(self, ranks: RankPermutation, syndrome: BitVector | None = None):
        self.ranks = ranks
        self.scheme = ranks.scheme
        self.mode = "plain" if self.scheme.ell == 0 else "segmented"
        if self.scheme.ell and (syndrome is None or syndrome.len < self.scheme.ell):
            raise ShapeError(f"segmented stream needs at least {self.scheme.ell} syndrome bits")
        self.syndrome = syndrome
        self.emitted = 0
        self._it = self._generate()

    @classmethod
    def plain(cls, gamma) -> "PatternStream":
        return cls(RankPermutation.from_reliabilities(gamma))

    def _generate(self) -> Iterator[tuple[int, tuple[int, ...]]]:
        scheme = self.scheme
        chosen_row = {seg: i for i, seg in enumerate(scheme.chosen)}
        walk = list(scheme.non_chosen) + list(scheme.chosen)
        lengths = [scheme.segments[s].size for s in walk]
        lo_tab, hi_tab = weight_bounds(lengths)
        orders = self.ranks.segment_order
        s_bits = [self.syndrome[i] for i in range(scheme.ell)] if scheme.ell else []
        last = len(walk) - 1
        parity: dict[int, int] = {}

        def fits(d: int, rem_w: int, rem_p: int) -> bool:
            # can segments d.. absorb exactly rem_w weight in rem_p flips?
            return 0 <= rem_p < len(lo_tab[d]) and lo_tab[d][rem_p] <= rem_w <= hi_tab[d][rem_p]

        def descend(d: int, rem_w: int, rem_p: int):
            seg = walk[d]
            length = lengths[d]
            need = None
            if seg in chosen_row:
                i = chosen_row[seg]
                need = s_bits[i]
                for v in scheme.relation[i]:
                    need ^= parity[v]
            for w in range(min(rem_w, max_weight(length)) + 1):
                for p in range(min(rem_p, length) + 1):
                    if need is not None and p % 2 != need:
                        continue
                    if not fits(d + 1, rem_w - w, rem_p - p):
                        continue
                    for parts in distinct_parts(w, p, 1, length):
                        parity[seg] = p & 1
                        cols = tuple(int(orders[seg][r - 1]) for r in parts)
                        if d == last:
                            yield cols
                        else:
                            for tail in descend(d + 1, rem_w - w, rem_p - p):
                                yield cols + tail

        for total in range(hi_tab[0][-1] + 1):
            for flips in range(len(lo_tab[0])):
                if fits(0, total, flips):
                    for cols in descend(0, total, flips):
                        yield total, cols

    def positions(self) -> Iterator[tuple[int, tuple[int, ...]]]:
        for item in self._it:
            self.emitted += 1
            yield item

    def __iter__(self):
        return self

    def __next__(self) -> BitVector:
        _, cols = next(self._it)
        self.emitted += 1
        return BitVector.from_indices(self.ranks.n, cols)


def plain_next(stream: PatternStream) -> BitVector | None:
    """Next pattern of a plain stream, or None once all ``2**n`` are out."""
    if stream.mode != "plain":
        raise ValueError("stream is segmented")
    return next(stream, None)


def segmented_next(stream: PatternStream) -> BitVector | None:
    """Next admissible pattern of a segmented stream, or None when exhausted."""
    if stream.mode != "segmented":
        raise ValueError("stream is plain")
    return next(stream, None)
