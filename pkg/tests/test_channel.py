import math
from statistics import NormalDist

import numpy as np
import pytest

from btt_grand.channel import ChannelConfig, demodulate, llr, modulate, transmit
from btt_grand.constraints import build_scheme
from btt_grand.gf2 import BitVector
from btt_grand.tree import sort_columns_tree


def test_noise_sigma():
    cfg = ChannelConfig(0.0, 0.5)
    assert cfg.noise_sigma == pytest.approx(1.0)
    assert ChannelConfig(3.0, 1.0).noise_sigma == pytest.approx((2 * 10**0.3) ** -0.5)
    with pytest.raises(ValueError):
        ChannelConfig(1.0, 0.0)


def test_noiseless_limit():
    x = BitVector.from_dense([0, 1, 1, 0, 1])
    r = transmit(x, ChannelConfig(0, 0.5), np.random.default_rng(0), sigma=1e-9)
    assert np.allclose(r, modulate(x), atol=1e-6)
    assert modulate(x).tolist() == [1, -1, -1, 1, -1]


def test_transmit_deterministic():
    cfg = ChannelConfig(2.0, 0.5)
    x = np.zeros(64, dtype=np.uint8)
    a = transmit(x, cfg, np.random.default_rng(5))
    b = transmit(x, cfg, np.random.default_rng(5))
    assert np.array_equal(a, b)


def test_noise_variance():
    cfg = ChannelConfig(1.0, 0.5)
    r = transmit(np.zeros(100_000, dtype=np.uint8), cfg, np.random.default_rng(1))
    assert abs((r - 1.0).var() / cfg.noise_sigma**2 - 1) < 0.03


def test_llr_examples():
    cfg = ChannelConfig(0.0, 0.5)
    assert llr(0.0, cfg) == 0.0
    assert llr(1.0, cfg, sigma=1.0) == pytest.approx(-2.0)
    assert llr(0.8, cfg) < 0 < llr(-0.8, cfg)


def test_demodulate_noiseless_zero():
    cfg = ChannelConfig(3.0, 0.5)
    frame = demodulate(np.ones(6), cfg)
    assert frame.hard == BitVector.zeros(6) and frame.n == 6


def test_demodulate_ranks():
    rng = np.random.default_rng(2)
    r = rng.standard_normal(20)
    frame = demodulate(r, ChannelConfig(1.0, 0.5))
    ranks = frame.ranks.global_rank
    assert sorted(ranks.tolist()) == list(range(1, 21))
    assert np.all(np.diff(frame.reliabilities[np.argsort(ranks)]) >= 0)
    assert np.array_equal(np.argsort(np.abs(r)), np.argsort(frame.reliabilities))
    assert frame.hard.to_dense().tolist() == (r < 0).astype(int).tolist()


def test_with_scheme(tree8_h):
    scheme = build_scheme(sort_columns_tree(tree8_h), 1)
    frame = demodulate(np.linspace(-1, 1, 8), ChannelConfig(1.0, 0.5)).with_scheme(scheme)
    assert sorted(frame.ranks.segment_rank[:4].tolist()) == [1, 2, 3, 4]


def test_hard_error_rate():
    cfg = ChannelConfig(2.0, 0.5)
    sigma = cfg.noise_sigma
    r = transmit(np.zeros(200_000, dtype=np.uint8), cfg, np.random.default_rng(3))
    p = float((llr(r, cfg) > 0).mean())
    want = 1 - NormalDist().cdf(1 / sigma)
    assert abs(p - want) < 4 * math.sqrt(want * (1 - want) / r.size)
