from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from btt_grand.constraints import build_scheme, unsegmented, verify_pattern
from btt_grand.errors import ShapeError
from btt_grand.gf2 import BitMatrix, BitVector
from btt_grand.patterns import (
    PatternStream,
    RankPermutation,
    SubEffectStream,
    constrained_sub_next,
    distinct_parts,
    plain_next,
    pseudo_weight,
    segmented_next,
    sub_effects,
    weight_bounds,
)
from btt_grand.tree import max_usable_rows, sort_columns_tree


def test_first_emission_is_zero():
    s = PatternStream.plain([0.3, 0.1, 0.9])
    assert plain_next(s) == BitVector.zeros(3)


def test_weight_three_level():
    gamma = [0.5, 0.1, 0.9, 0.2, 0.7]  # ranks 3, 1, 5, 2, 4
    level = [set(c) for w, c in PatternStream.plain(gamma).positions() if w == 3]
    assert level == [{0}, {1, 3}]


def test_n4_emits_all_16():
    pats = list(PatternStream.plain([0.4, 0.3, 0.2, 0.1]).positions())
    assert len(pats) == 16 and len({frozenset(c) for _, c in pats}) == 16
    ws = [w for w, _ in pats]
    assert ws == sorted(ws)


def test_plain_exhaustion_returns_none():
    s = PatternStream.plain([0.1])
    assert plain_next(s) is not None and plain_next(s) is not None
    assert plain_next(s) is None and s.emitted == 2


def test_distinct_parts_oracle():
    for total in range(16):
        for count in range(5):
            want = sorted(c for c in combinations(range(1, 7), count) if sum(c) == total)
            assert list(distinct_parts(total, count, 1, 6)) == want


def test_sub_effect_streams():
    assert constrained_sub_next(SubEffectStream([0, 1, 2], 0)) == BitVector.zeros(3)
    odd = list(SubEffectStream([1, 0], 1))
    assert odd == [BitVector.from_indices(2, [1]), BitVector.from_indices(2, [0])]
    assert len(list(SubEffectStream([0, 1, 2], 0))) == 4
    assert list(sub_effects(3, 3, 0)) == [(1, 2)]


def test_weight_bounds_oracle():
    lengths = [2, 3, 1]
    lo, hi = weight_bounds(lengths)
    assert lo[-1] == [0] and hi[-1] == [0]
    for d in range(len(lengths)):
        sizes = lengths[d:]
        best = {}
        # brute force over every choice of rank subsets per segment
        def walk(i, w, p):
            if i == len(sizes):
                a, b = best.get(p, (10**9, -1))
                best[p] = (min(a, w), max(b, w))
                return
            for k in range(sizes[i] + 1):
                for c in combinations(range(1, sizes[i] + 1), k):
                    walk(i + 1, w + sum(c), p + k)
        walk(0, 0, 0)
        for p, (a, b) in best.items():
            assert (lo[d][p], hi[d][p]) == (a, b)


def test_pseudo_weight_examples(tree8_h):
    gamma = np.array([0.8, 0.2, 0.5, 0.9, 0.1, 0.6, 0.3, 0.7])
    ranks = RankPermutation.from_reliabilities(gamma)
    assert pseudo_weight(BitVector.zeros(8), ranks) == 0
    assert pseudo_weight(BitVector.from_indices(8, [4]), ranks) == 1
    scheme = build_scheme(sort_columns_tree(tree8_h), 2)
    seg = RankPermutation.from_reliabilities(gamma, scheme)
    # least reliable bit of segments {0,1} and {2,3}
    z = BitVector.from_indices(8, [1, 2])
    assert pseudo_weight(z, seg, "segmented") == 2
    assert pseudo_weight(z, seg, "plain") == 2 + 4
    with pytest.raises(ValueError):
        pseudo_weight(z, seg, "other")
    with pytest.raises(ShapeError):
        pseudo_weight(BitVector.zeros(3), seg)


def test_segmented_zero_syndrome_starts_at_zero(tree8_h):
    scheme = build_scheme(sort_columns_tree(tree8_h), 3)
    ranks = RankPermutation.from_reliabilities(np.linspace(1, 2, 8), scheme)
    assert segmented_next(PatternStream(ranks, BitVector.zeros(3))) == BitVector.zeros(8)


def test_segmented_s1_flips_least_reliable_of_chosen(tree8_h):
    scheme = build_scheme(sort_columns_tree(tree8_h), 1)
    gamma = np.array([0.5, 0.9, 0.4, 0.7, 0.1, 0.2, 0.3, 0.6])
    ranks = RankPermutation.from_reliabilities(gamma, scheme)
    stream = PatternStream(ranks, BitVector.from_dense([1, 0, 0]))
    assert segmented_next(stream) == BitVector.from_indices(8, [2])
    for _ in range(40):
        z = segmented_next(stream)
        assert z.to_dense()[:4].sum() % 2 == 1


def test_stream_mode_checks(tree8_h):
    scheme = build_scheme(sort_columns_tree(tree8_h), 2)
    ranks = RankPermutation.from_reliabilities(np.ones(8), scheme)
    with pytest.raises(ShapeError):
        PatternStream(ranks)
    with pytest.raises(ValueError):
        plain_next(PatternStream(ranks, BitVector.zeros(3)))
    with pytest.raises(ValueError):
        segmented_next(PatternStream.plain(np.ones(3)))
    with pytest.raises(ShapeError):
        RankPermutation.from_reliabilities(np.ones(5), scheme)


@given(st.integers(0, 2**32 - 1))
def test_segmented_stream_equals_filter(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(2, 5)), int(rng.integers(4, 11))
    layout = sort_columns_tree(BitMatrix.from_dense(rng.integers(0, 2, (m, n), dtype=np.uint8)))
    ell = max_usable_rows(layout)
    scheme = build_scheme(layout, ell)
    gamma = rng.random(n)
    s = BitVector.from_dense(rng.integers(0, 2, m, dtype=np.uint8))
    ranks = RankPermutation.from_reliabilities(gamma, scheme)
    got = list(PatternStream(ranks, s if ell else None).positions())
    sets = [frozenset(c) for _, c in got]
    want = {frozenset(np.flatnonzero(BitVector.from_int(n, z).to_dense()).tolist())
            for z in range(1 << n) if verify_pattern(scheme, BitVector.from_int(n, z), s)}
    assert len(sets) == len(set(sets)) == 1 << (n - ell)
    assert set(sets) == want
    ws = [w for w, _ in got]
    assert ws == sorted(ws)
    for w, cols in got:
        assert w == pseudo_weight(BitVector.from_indices(n, cols), ranks,
                                  "segmented" if ell else "plain")


@given(st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=9))
def test_plain_is_orbgrand_order(gamma):
    ranks = RankPermutation.from_reliabilities(gamma)
    assert sorted(ranks.global_rank.tolist()) == list(range(1, len(gamma) + 1))
    got = list(PatternStream(ranks).positions())
    assert len({frozenset(c) for _, c in got}) == 1 << len(gamma)
    for w, cols in got:
        assert w == int(ranks.global_rank[list(cols)].sum())
    assert [w for w, _ in got] == sorted(w for w, _ in got)
    # depth-0 scheme gives the same order
    same = PatternStream(RankPermutation.from_reliabilities(gamma, unsegmented(len(gamma))))
    assert [c for _, c in same.positions()] == [c for _, c in got]
