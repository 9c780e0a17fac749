"""Tree-structured parity check matrices and the balanced tree transformation.

A matrix is in tree structure when its columns, read as integers with the top
row as the most significant bit, are sorted in non-increasing order.  Then the
columns sharing any given top-``l`` prefix form a contiguous block (a leaf set).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from math import exp, floor, log2

import numpy as np

from .errors import ShapeError, TransformationError
from .gf2 import BitMatrix, Permutation, is_invertible, mat_mul, random_matrix


@dataclass(frozen=True)
class TreeLayout:
    h_tree: BitMatrix
    perm: Permutation
    column_values: tuple[int, ...]

    @property
    def m(self) -> int:
        return self.h_tree.rows

    @property
    def n(self) -> int:
        return self.h_tree.cols


@dataclass(frozen=True)
class LeafSet:
    """Columns ``lo <= j < hi`` whose top rows equal ``prefix``."""

    prefix: tuple[int, ...]
    lo: int
    hi: int

    @property
    def size(self) -> int:
        return self.hi - self.lo

    def __len__(self) -> int:
        return self.size

    def columns(self) -> range:
        return range(self.lo, self.hi)


@dataclass(frozen=True)
class BttResult:
    a: BitMatrix
    layout: TreeLayout
    usable_rows: int
    balance_score: float
    attempts: int = field(default=1, compare=False)


def sort_columns_tree(h: BitMatrix) -> TreeLayout:
    """Stable sort of the columns of ``h`` by value, largest first."""
    values = h.column_values()
    order = sorted(range(h.cols), key=lambda j: -values[j])
    perm = Permutation(order)
    return TreeLayout(h.permute_columns(perm), perm, tuple(values[j] for j in order))


def prefix_value(prefix) -> int:
    v = 0
    for bit in prefix:
        v = (v << 1) | int(bit)
    return v


def _prefix_bits(value: int, ell: int) -> tuple[int, ...]:
    return tuple((value >> (ell - 1 - i)) & 1 for i in range(ell))


def leaf_sets(layout: TreeLayout, ell: int) -> list[LeafSet]:
    """All ``2**ell`` leaf sets at depth ``ell``, prefixes in descending order."""
    if not 1 <= ell <= layout.m:
        raise ValueError(f"depth {ell} outside 1..{layout.m}")
    shift = layout.m - ell
    # ascending keys for bisect
    keys = [-(v >> shift) for v in layout.column_values]
    out = []
    for value in range((1 << ell) - 1, -1, -1):
        lo = bisect.bisect_left(keys, -value)
        hi = bisect.bisect_right(keys, -value)
        out.append(LeafSet(_prefix_bits(value, ell), lo, hi))
    return out


def leaf_set(layout: TreeLayout, prefix) -> LeafSet:
    ell = len(prefix)
    if not 1 <= ell <= layout.m:
        raise ValueError(f"depth {ell} outside 1..{layout.m}")
    shift = layout.m - ell
    value = prefix_value(prefix)
    keys = [-(v >> shift) for v in layout.column_values]
    return LeafSet(tuple(int(b) for b in prefix),
                   bisect.bisect_left(keys, -value), bisect.bisect_right(keys, -value))


def unit_prefix(i: int, ell: int) -> tuple[int, ...]:
    """Weight-one prefix with its single 1 at position ``i`` (0-based)."""
    return tuple(int(j == i) for j in range(ell))


def max_usable_rows(layout: TreeLayout) -> int:
    """Largest ``l`` for which every weight-one prefix of length ``l`` has a
    nonempty leaf set, capped at ``min(m, floor(log2 n))``."""
    cap = min(layout.m, floor(log2(layout.n))) if layout.n > 1 else 0
    best = 0
    for ell in range(1, cap + 1):
        if all(leaf_set(layout, unit_prefix(i, ell)).size for i in range(ell)):
            best = ell
        else:
            break
    return best


def row_balance(h: BitMatrix, rows: int) -> float:
    """Largest deviation of the ones-fraction from 1/2 over the first rows."""
    if rows == 0:
        return 0.0
    frac = h.to_dense()[:rows].mean(axis=1)
    return float(np.abs(frac - 0.5).max())


def btt(
    h: BitMatrix,
    rng: np.random.Generator,
    target_l: int,
    balance_delta: float = 0.15,
    max_attempts: int = 1000,
) -> BttResult:
    """Balanced tree transformation by rejection sampling.

    Each attempt draws a uniform ``m x m`` matrix ``A``; singular draws count
    as failed attempts.  The first attempt where ``tree(A H)`` has at least
    ``target_l`` usable rows and each of those rows has a ones-fraction within
    ``balance_delta`` of 1/2 is returned.
    """
    if target_l < 0 or (target_l > 0 and target_l > floor(log2(h.cols))):
        raise ValueError(f"target_l={target_l} exceeds floor(log2 n) for n={h.cols}")
    if target_l > h.rows:
        raise ValueError(f"target_l={target_l} exceeds m={h.rows}")
    if not 0 < balance_delta <= 0.5:
        raise ValueError("balance_delta must lie in (0, 0.5]")
    best: BttResult | None = None
    for attempt in range(1, max_attempts + 1):
        a = random_matrix(h.rows, h.rows, rng)
        if not is_invertible(a):
            continue
        layout = sort_columns_tree(mat_mul(a, h))
        usable = max_usable_rows(layout)
        score = row_balance(layout.h_tree, target_l)
        result = BttResult(a, layout, usable, score, attempt)
        if usable >= target_l and score <= balance_delta:
            return result
        if best is None or (usable, -score) > (best.usable_rows, -best.balance_score):
            best = result
    raise TransformationError(
        f"no acceptable transform in {max_attempts} attempts "
        f"(target_l={target_l}, delta={balance_delta})",
        best,
    )


def identity_transform(h: BitMatrix) -> BttResult:
    """Tree sort with ``A = I``; no balancing."""
    layout = sort_columns_tree(h)
    usable = max_usable_rows(layout)
    return BttResult(BitMatrix.identity(h.rows), layout, usable,
                     row_balance(layout.h_tree, usable), 0)


@dataclass
class Theorem1Report:
    """Monte Carlo statistics of ``A H`` for uniform random ``A``.

    ``block_means[j]`` is the mean entry of the j-th ``m x m`` block; the
    tracked entry is (0, 0) of block 0.  ``row_correlation`` is the mean
    absolute Pearson correlation between distinct rows, taken column by column
    across samples.  ``violation_fraction`` counts block rows whose ones
    fraction deviates from 1/2 by more than ``delta``.
    """

    m: int
    blocks: int
    samples: int
    delta: float
    preconditions_met: bool
    notes: list[str]
    block_means: list[float]
    tracked_entry_mean: float
    row_correlation: float
    violation_fraction: float
    hoeffding_row_bound: float


def theorem1_diagnostics(
    h: BitMatrix, rng: np.random.Generator, samples: int, delta: float = 0.15
) -> Theorem1Report:
    m, n = h.shape
    notes = []
    ok = True
    if n % m:
        ok = False
        notes.append(f"n={n} is not a multiple of m={m}; statistics use whole blocks only")
    blocks = n // m
    dense_h = h.to_dense()
    for j in range(blocks):
        if not is_invertible(BitMatrix.from_dense(dense_h[:, j * m:(j + 1) * m])):
            ok = False
            notes.append(f"block {j} is singular")
    if blocks == 0:
        raise ShapeError(f"need at least m={m} columns")

    ht = dense_h[:, :blocks * m].astype(np.int64)
    a = np.stack([random_matrix(m, m, rng).to_dense() for _ in range(samples)]).astype(np.int64)
    prod = (a @ ht) & 1  # (samples, m, blocks*m)
    cube = prod.reshape(samples, m, blocks, m)

    block_means = [float(cube[:, :, j, :].mean()) for j in range(blocks)]
    tracked = float(cube[:, 0, 0, 0].mean())

    x = prod.astype(np.float64)
    x -= x.mean(axis=0, keepdims=True)
    sd = x.std(axis=0)
    cov = np.einsum("sic,sjc->cij", x, x) / samples
    denom = np.einsum("ic,jc->cij", sd, sd)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.where(denom > 0, cov / denom, 0.0)
    off = ~np.eye(m, dtype=bool)
    row_corr = float(np.abs(corr[:, off]).mean()) if m > 1 else 0.0

    frac = cube.mean(axis=3)  # ones fraction per (sample, row, block)
    violation = float((np.abs(frac - 0.5) > delta).mean())
    return Theorem1Report(
        m=m, blocks=blocks, samples=samples, delta=delta, preconditions_met=ok,
        notes=notes, block_means=block_means, tracked_entry_mean=tracked,
        row_correlation=row_corr, violation_fraction=violation,
        hoeffding_row_bound=2 * exp(-2 * delta * delta * m),
    )
