"""Exhaustive cross-checks for small codes (n <= 20).

Each check compares a component against brute force over all ``2**n``
patterns (or all ``2**k`` codewords) and reports the first counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .code import LinearCode, apply_equivalence
from .constraints import SegmentationScheme, build_scheme, unsegmented, verify_pattern
from .errors import ConfigurationError, SchemeError
from .gf2 import BitVector
from .patterns import PatternStream, RankPermutation
from .tree import BttResult, btt, max_usable_rows

MAX_N = 20


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


def _bits(mask: int, n: int) -> str:
    return "".join(str((mask >> j) & 1) for j in range(n))


def all_syndromes(code: LinearCode) -> np.ndarray:
    """Syndrome (row i at bit i) of every pattern ``0 .. 2**n - 1``, where bit
    ``j`` of the pattern index is position ``j``."""
    n = code.n
    if n > MAX_N:
        raise ConfigurationError(f"n={n} exceeds the oracle limit {MAX_N}")
    pats = np.arange(1 << n, dtype=np.int64)
    syn = np.zeros(1 << n, dtype=np.int64)
    for j, c in enumerate(code.column_syndromes):
        syn ^= np.where((pats >> j) & 1, c, 0)
    return syn


def corrupt_scheme(scheme: SegmentationScheme) -> SegmentationScheme:
    """Toggle one non-chosen segment in the first relation."""
    if scheme.ell == 0 or not scheme.non_chosen:
        raise SchemeError("scheme has no relation bit to flip")
    victim = scheme.non_chosen[0]
    rel0 = set(scheme.relation[0]) ^ {victim}
    return replace(scheme, relation=(tuple(sorted(rel0)),) + scheme.relation[1:])


def check_stream(code: LinearCode, scheme: SegmentationScheme, gamma, s: BitVector,
                 syn: np.ndarray | None = None) -> CheckResult:
    """Segmented emissions equal the brute-force filter through the first
    ``ell`` syndrome bits; weights are non-decreasing and nothing repeats."""
    n, ell = code.n, scheme.ell
    name = f"stream n={n} l={ell} s={''.join(str(s[i]) for i in range(code.m))}"
    syn = all_syndromes(code) if syn is None else syn
    mask = (1 << ell) - 1
    expect = set(np.flatnonzero((syn & mask) == (s.to_int() & mask)).tolist())
    ranks = RankPermutation.from_reliabilities(gamma, scheme)
    seen: set[int] = set()
    last = -1
    for weight, cols in PatternStream(ranks, s if ell else None).positions():
        z = 0
        for c in cols:
            z |= 1 << c
        if weight < last:
            return CheckResult(name, False, f"weight drops to {weight} at {_bits(z, n)}")
        if z in seen:
            return CheckResult(name, False, f"duplicate {_bits(z, n)}")
        if z not in expect:
            return CheckResult(name, False, f"emitted invalid pattern {_bits(z, n)}")
        last = weight
        seen.add(z)
    missing = expect - seen
    if missing:
        return CheckResult(name, False, f"never emitted {_bits(min(missing), n)}")
    return CheckResult(name, True, f"{len(seen)} patterns")


def check_codebook(code: LinearCode, result: BttResult) -> CheckResult:
    """Codebook of the transformed code equals the permuted original."""
    name = f"codebook n={code.n} k={code.k}"
    new = apply_equivalence(code, result.a, result.layout.perm)
    perm = result.layout.perm
    moved = {perm.apply(c) for c in code.codebook()}
    book = new.codebook()
    if book != moved:
        bad = sorted((book ^ moved), key=lambda v: v.to_int())[0]
        return CheckResult(name, False, f"mismatch at {''.join(map(str, bad.to_dense()))}")
    hz = new.H.to_dense().astype(np.int64)
    for c in moved:
        if ((hz @ c.to_dense().astype(np.int64)) & 1).any():
            return CheckResult(name, False, "permuted codeword fails transformed H")
    return CheckResult(name, True, f"{len(book)} codewords")


def check_constraints(code: LinearCode, scheme: SegmentationScheme, s: BitVector,
                      syn: np.ndarray | None = None, sample: int | None = None,
                      rng: np.random.Generator | None = None) -> CheckResult:
    """verify_pattern agrees with the first ``ell`` syndrome bits."""
    n, ell = code.n, scheme.ell
    name = f"constraints n={n} l={ell}"
    syn = all_syndromes(code) if syn is None else syn
    mask = (1 << ell) - 1
    pats = np.arange(1 << n)
    if sample is not None and sample < pats.size:
        pats = (rng or np.random.default_rng(0)).choice(pats, sample, replace=False)
    for z in pats.tolist():
        want = (int(syn[z]) & mask) == (s.to_int() & mask)
        if verify_pattern(scheme, BitVector.from_int(n, z), s) != want:
            return CheckResult(name, False, f"disagree on {_bits(z, n)}")
    return CheckResult(name, True, f"{pats.size} patterns")


def check_plain_vs_unsegmented(n: int, gamma) -> CheckResult:
    """The plain stream and the depth-0 segmented stream coincide and emit
    every pattern exactly once."""
    name = f"plain-vs-l0 n={n}"
    a = [cols for _, cols in PatternStream.plain(gamma).positions()]
    ranks = RankPermutation.from_reliabilities(gamma, unsegmented(n))
    b = [cols for _, cols in PatternStream(ranks).positions()]
    sa = {frozenset(c) for c in a}
    if a != b or len(sa) != 1 << n or len(a) != 1 << n:
        return CheckResult(name, False, f"{len(a)} vs {len(b)} emissions, {len(sa)} distinct")
    return CheckResult(name, True, f"{len(a)} patterns")


def run_suite(code: LinearCode, ell: int, rng: np.random.Generator, corrupt: bool = False,
              trials: int = 2, result: BttResult | None = None) -> list[CheckResult]:
    """BTT the code, then run every check at depth ``ell``."""
    if code.n > MAX_N:
        raise ConfigurationError(f"n={code.n} exceeds the oracle limit {MAX_N}")
    result = result or btt(code.H, rng, ell)
    if ell > max_usable_rows(result.layout):
        raise ConfigurationError(f"l={ell} exceeds usable rows of the transform")
    tcode = apply_equivalence(code, result.a, result.layout.perm)
    scheme = build_scheme(result.layout, ell)
    if corrupt:
        scheme = corrupt_scheme(scheme)
    syn = all_syndromes(tcode)
    out = [check_codebook(code, result)] if code.k <= 20 else []
    for _ in range(trials):
        gamma = rng.random(code.n)
        s = BitVector.from_int(tcode.m, int(syn[int(rng.integers(1 << code.n))]))
        out.append(check_stream(tcode, scheme, gamma, s, syn))
        out.append(check_constraints(tcode, scheme, s, syn, sample=4096, rng=rng))
    small = min(code.n, 12)
    out.append(check_plain_vs_unsegmented(small, rng.random(small)))
    return out
