"""BPSK over AWGN: modulation, LLRs, hard decisions and reliability ranks.

Bit 0 maps to +1 and bit 1 to -1 with unit symbol energy.  The LLR is taken
as log f(r | 1) / f(r | 0), so a positive LLR favours bit 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import SegmentationScheme
from .gf2 import BitVector
from .patterns import RankPermutation


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    rate: float

    def __post_init__(self):
        if not 0 < self.rate <= 1:
            raise ValueError(f"rate {self.rate} outside (0, 1]")

    @property
    def noise_sigma(self) -> float:
        return (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0)) ** -0.5


@dataclass(frozen=True)
class ReceivedFrame:
    soft: np.ndarray
    hard: BitVector
    reliabilities: np.ndarray
    ranks: RankPermutation

    @property
    def n(self) -> int:
        return int(self.soft.size)

    def with_scheme(self, scheme: SegmentationScheme) -> "ReceivedFrame":
        """Same frame with within-segment ranks for ``scheme``."""
        ranks = RankPermutation.from_reliabilities(self.reliabilities, scheme)
        return ReceivedFrame(self.soft, self.hard, self.reliabilities, ranks)


def modulate(x) -> np.ndarray:
    bits = x.to_dense() if isinstance(x, BitVector) else np.asarray(x, dtype=np.uint8)
    return 1.0 - 2.0 * bits.astype(np.float64)


def transmit(x, cfg: ChannelConfig, rng: np.random.Generator, sigma: float | None = None) -> np.ndarray:
    """Received samples ``(1 - 2x) + N(0, sigma^2)``.

    ``sigma`` overrides the value derived from ``cfg``.
    """
    s = modulate(x)
    sd = cfg.noise_sigma if sigma is None else sigma
    return s + sd * rng.standard_normal(s.size)


def llr(r, cfg: ChannelConfig, sigma: float | None = None):
    """``log f(r|1)/f(r|0) = -2 r / sigma^2``."""
    sd = cfg.noise_sigma if sigma is None else sigma
    return -2.0 * np.asarray(r, dtype=np.float64) / (sd * sd)


def demodulate(
    soft, cfg: ChannelConfig, scheme: SegmentationScheme | None = None, sigma: float | None = None
) -> ReceivedFrame:
    soft = np.asarray(soft, dtype=np.float64)
    lam = llr(soft, cfg, sigma)
    hard = BitVector.from_dense((lam > 0).astype(np.uint8))
    gamma = np.abs(lam)
    return ReceivedFrame(soft, hard, gamma, RankPermutation.from_reliabilities(gamma, scheme))
