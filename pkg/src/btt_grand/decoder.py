"""GRAND decoding over a pattern stream with a query cap."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .code import LinearCode, syndrome
from .constraints import SegmentationScheme, unsegmented
from .errors import ConfigurationError
from .gf2 import BitVector, pack_bits
from .patterns import PatternStream, RankPermutation, weight_bounds

DEFAULT_MAX_QUERIES = 10**6


@dataclass(frozen=True)
class DecodeOutcome:
    status: str
    codeword: BitVector | None
    noise_effect: BitVector | None
    queries: int
    ell_used: int

    @property
    def decoded(self) -> bool:
        return self.status == "decoded"


def check_scheme(code: LinearCode, scheme: SegmentationScheme) -> None:
    """Raise ConfigurationError unless every segment of ``scheme`` is a leaf
    set of the first ``scheme.ell`` rows of ``code.H``."""
    if scheme.n != code.n:
        raise ConfigurationError(f"scheme covers {scheme.n} bits, code has n={code.n}")
    if scheme.ell > code.m:
        raise ConfigurationError(f"scheme uses {scheme.ell} rows, H has {code.m}")
    if scheme.ell == 0:
        return
    top = code.H.to_dense()[:scheme.ell]
    for leaf in scheme.segments:
        block = top[:, leaf.lo:leaf.hi]
        if not (block == np.array(leaf.prefix, dtype=np.uint8)[:, None]).all():
            raise ConfigurationError(
                f"columns {leaf.lo}..{leaf.hi - 1} do not share prefix "
                f"{''.join(map(str, leaf.prefix))} in H"
            )


def decode(
    frame,
    code: LinearCode,
    scheme: SegmentationScheme | None = None,
    max_queries: int = DEFAULT_MAX_QUERIES,
    engine: str = "compiled",
) -> DecodeOutcome:
    """Decode one :class:`~btt_grand.channel.ReceivedFrame`.

    ``engine="reference"`` walks :class:`PatternStream` in Python; the default
    compiled engine runs the same order in a numba kernel.
    """
    if max_queries < 1:
        raise ValueError("max_queries must be >= 1")
    scheme = scheme or unsegmented(code.n)
    check_scheme(code, scheme)
    if engine == "reference":
        return _decode_reference(frame, code, scheme, max_queries)
    if engine != "compiled":
        raise ValueError(f"unknown engine {engine!r}")
    dec = BatchDecoder(code, scheme)
    hard = frame.hard.to_dense()[None, :]
    queries, found, noise = dec.decode_frames(frame.reliabilities[None, :], hard, max_queries)
    if not found[0]:
        return DecodeOutcome("abandoned", None, None, int(queries[0]), scheme.ell)
    z = BitVector.from_dense(noise[0])
    return DecodeOutcome("decoded", frame.hard ^ z, z, int(queries[0]), scheme.ell)


def _decode_reference(frame, code, scheme, max_queries) -> DecodeOutcome:
    s = syndrome(code, frame.hard)
    target = s.to_int()
    colsyn = code.column_syndromes
    ranks = RankPermutation.from_reliabilities(frame.reliabilities, scheme)
    stream = PatternStream(ranks, s if scheme.ell else None)
    queries = 0
    for _, cols in stream.positions():
        queries += 1
        acc = 0
        for c in cols:
            acc ^= colsyn[c]
        if acc == target:
            z = BitVector.from_indices(code.n, cols)
            return DecodeOutcome("decoded", frame.hard ^ z, z, queries, scheme.ell)
        if queries >= max_queries:
            break
    return DecodeOutcome("abandoned", None, None, queries, scheme.ell)


class BatchDecoder:
    """Compiled decoder bound to one code and segmentation scheme."""

    def __init__(self, code: LinearCode, scheme: SegmentationScheme | None = None):
        scheme = scheme or unsegmented(code.n)
        check_scheme(code, scheme)
        self.code = code
        self.scheme = scheme
        self.colsyn = np.ascontiguousarray(pack_bits(code.H.to_dense().T))
        walk = list(scheme.non_chosen) + list(scheme.chosen)
        depth = {seg: d for d, seg in enumerate(walk)}
        self.walk = walk
        self.seg_len = np.array([scheme.segments[s].size for s in walk], dtype=np.int64)
        self.seg_off = np.concatenate([[0], np.cumsum(self.seg_len)[:-1]]).astype(np.int64)
        self.seg_row = np.full(len(walk), -1, dtype=np.int64)
        width = max([len(r) for r in scheme.relation] + [1])
        self.rel = np.full((len(walk), width), -1, dtype=np.int64)
        for i, (c, rel) in enumerate(zip(scheme.chosen, scheme.relation)):
            d = depth[c]
            self.seg_row[d] = i
            self.rel[d, :len(rel)] = sorted(depth[v] for v in rel)
        lo, hi = weight_bounds(self.seg_len.tolist())
        self.lo_tab = np.full((len(walk) + 1, code.n + 1), 1 << 62, dtype=np.int64)
        self.hi_tab = np.full((len(walk) + 1, code.n + 1), -1, dtype=np.int64)
        for d in range(len(walk) + 1):
            self.lo_tab[d, :len(lo[d])] = lo[d]
            self.hi_tab[d, :len(hi[d])] = hi[d]

    def orders(self, gamma: np.ndarray) -> np.ndarray:
        """Per frame, the columns of each segment sorted by reliability, in
        walk order."""
        out = np.empty(gamma.shape, dtype=np.int64)
        for d, seg in enumerate(self.walk):
            leaf = self.scheme.segments[seg]
            off = self.seg_off[d]
            out[:, off:off + leaf.size] = leaf.lo + np.argsort(
                gamma[:, leaf.lo:leaf.hi], axis=1, kind="stable")
        return out

    def target(self, hard: np.ndarray) -> np.ndarray:
        """Syndromes of a batch of hard decisions, packed like ``colsyn``."""
        picked = np.where(hard.astype(bool)[:, :, None], self.colsyn[None, :, :], np.uint64(0))
        return np.ascontiguousarray(np.bitwise_xor.reduce(picked, axis=1))

    def decode_frames(self, gamma: np.ndarray, hard: np.ndarray, max_queries: int):
        """Decode a batch; returns (queries, found, noise) arrays."""
        gamma = np.atleast_2d(np.asarray(gamma, dtype=np.float64))
        hard = np.atleast_2d(np.asarray(hard, dtype=np.uint8))
        nframes = gamma.shape[0]
        queries = np.zeros(nframes, dtype=np.int64)
        found = np.zeros(nframes, dtype=np.bool_)
        noise = np.zeros((nframes, self.code.n), dtype=np.uint8)
        _kernels.decode_batch(self.colsyn, self.seg_len, self.seg_off, self.seg_row, self.rel,
                              self.lo_tab, self.hi_tab, self.orders(gamma), self.target(hard), int(max_queries),
                              queries, found, noise)
        return queries, found, noise
