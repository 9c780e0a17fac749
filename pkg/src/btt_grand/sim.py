"""Monte Carlo BLER and query-count sweeps over Eb/N0 and segmentation depth.

Every frame draws its message and channel noise from its own generator seeded
with ``(seed, 1, point, frame)``, so results do not depend on how frames are
split across threads.  All depths at one Eb/N0 point see the same frames.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Sequence

import numpy as np

from .channel import ChannelConfig
from .code import LinearCode, apply_equivalence
from .constraints import build_scheme
from .decoder import DEFAULT_MAX_QUERIES, BatchDecoder
from .errors import AnalysisError, ConfigurationError, TransformationError
from .tree import BttResult, btt

CHUNK = 256


@dataclass(frozen=True)
class ExperimentPlan:
    code: LinearCode
    ebn0_db: tuple[float, ...]
    ells: tuple[int, ...] = (0, 1)
    frames: int = 10_000
    max_queries: int = DEFAULT_MAX_QUERIES
    seed: int = 0
    target_l: int | None = None
    balance_delta: float = 0.15
    threads: int = 1
    check: bool = False

    def __post_init__(self):
        if self.frames < 1:
            raise ConfigurationError("frames must be >= 1")
        if self.max_queries < 1:
            raise ConfigurationError("max_queries must be >= 1")
        if not self.ells or min(self.ells) < 0:
            raise ConfigurationError(f"bad depth list {self.ells}")
        if not self.ebn0_db:
            raise ConfigurationError("empty Eb/N0 grid")
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")

    @property
    def btt_depth(self) -> int:
        return max(self.ells) if self.target_l is None else self.target_l


@dataclass(frozen=True)
class PointResult:
    ebn0_db: float
    ell: int
    frames: int
    block_errors: int
    abandoned: int
    avg_queries: float
    geomean_queries: float
    bler_lo: float
    bler_hi: float
    seed: int = 0
    queries: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def bler(self) -> float:
        return self.block_errors / self.frames


def wilson_interval(errors: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    z = NormalDist().inv_cdf(0.5 + level / 2)
    p = errors / trials
    denom = 1 + z * z / trials
    mid = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if errors == 0 else max(0.0, mid - half)
    hi = 1.0 if errors == trials else min(1.0, mid + half)
    return lo, hi


def transform(plan: ExperimentPlan) -> BttResult:
    """The plan's BTT draw; the generator is seeded with ``(seed, 0)``."""
    try:
        return btt(plan.code.H, np.random.default_rng((plan.seed, 0)), plan.btt_depth,
                   plan.balance_delta)
    except TransformationError as exc:
        raise TransformationError(
            f"{exc.args[0]} for n={plan.code.n}, k={plan.code.k}, seed={plan.seed}", exc.best
        ) from exc


def _chunk(code, decoders, sigma, seed, point, lo, hi, max_queries, check):
    n, k = code.n, code.k
    g = code.G.to_dense().astype(np.int64)
    msgs = np.empty((hi - lo, k), dtype=np.int64)
    noise = np.empty((hi - lo, n))
    for i, frame in enumerate(range(lo, hi)):
        rng = np.random.default_rng((seed, 1, point, frame))
        msgs[i] = rng.integers(0, 2, k)
        noise[i] = rng.standard_normal(n)
    x = (msgs @ g) & 1
    r = 1.0 - 2.0 * x + sigma * noise
    lam = -2.0 * r / (sigma * sigma)
    hard = (lam > 0).astype(np.uint8)
    gamma = np.abs(lam)
    out = []
    for dec in decoders:
        q, found, z = dec.decode_frames(gamma, hard, max_queries)
        decoded = hard ^ z
        if check and found.any():
            syn = (decoded[found].astype(np.int64) @ code.H.to_dense().T.astype(np.int64)) & 1
            assert not syn.any(), "decoder returned a non-codeword"
        wrong = (decoded != x).any(axis=1) | ~found
        out.append((q, int(wrong.sum()), int((~found).sum())))
    return out


def run(plan: ExperimentPlan, result: BttResult | None = None) -> list[PointResult]:
    """One :class:`PointResult` per (Eb/N0, depth), Eb/N0-major."""
    result = result or transform(plan)
    if max(plan.ells) > result.usable_rows:
        raise ConfigurationError(
            f"depth {max(plan.ells)} exceeds the {result.usable_rows} usable rows of the transform"
        )
    code = apply_equivalence(plan.code, result.a, result.layout.perm)
    decoders = [BatchDecoder(code, build_scheme(result.layout, ell)) for ell in plan.ells]
    spans = [(lo, min(lo + CHUNK, plan.frames)) for lo in range(0, plan.frames, CHUNK)]
    points = []
    with ThreadPoolExecutor(plan.threads) as pool:
        for point, ebn0 in enumerate(plan.ebn0_db):
            sigma = ChannelConfig(ebn0, code.rate).noise_sigma
            parts = list(pool.map(
                lambda s: _chunk(code, decoders, sigma, plan.seed, point, s[0], s[1],
                                 plan.max_queries, plan.check),
                spans,
            ))
            for j, ell in enumerate(plan.ells):
                q = np.concatenate([p[j][0] for p in parts])
                errors = sum(p[j][1] for p in parts)
                lo, hi = wilson_interval(errors, plan.frames)
                points.append(PointResult(
                    ebn0_db=float(ebn0), ell=ell, frames=plan.frames, block_errors=errors,
                    abandoned=sum(p[j][2] for p in parts),
                    avg_queries=int(q.sum()) / plan.frames,
                    geomean_queries=float(np.exp(np.log(q).mean())),
                    bler_lo=lo, bler_hi=hi, seed=plan.seed, queries=q,
                ))
    return points


def query_reduction_ratios(results: Sequence[PointResult]) -> dict[tuple[float, int], float]:
    """``log2(avg_queries[l=0] / avg_queries[l])`` keyed by (Eb/N0, l)."""
    base = {r.ebn0_db: r.avg_queries for r in results if r.ell == 0}
    out = {}
    for r in results:
        if r.ebn0_db not in base:
            raise AnalysisError(f"no l=0 baseline at {r.ebn0_db} dB")
        out[(r.ebn0_db, r.ell)] = math.log2(base[r.ebn0_db] / r.avg_queries)
    return out


def snr_at_bler(results: Sequence[PointResult], ell: int, target: float) -> float:
    """Eb/N0 where BLER crosses ``target``, by linear interpolation of
    log BLER between the bracketing grid points."""
    pts = sorted((r.ebn0_db, r.bler) for r in results if r.ell == ell)
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if y0 >= target >= y1 and y0 > 0 and y1 > 0:
            if y0 == y1:
                return x0
            t = (math.log(y0) - math.log(target)) / (math.log(y0) - math.log(y1))
            return x0 + t * (x1 - x0)
    raise AnalysisError(f"BLER {target} not bracketed for l={ell}")
