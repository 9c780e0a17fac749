"""Parity constraints extracted from the top rows of a tree-structured H.

With the first ``l`` rows in tree structure, row ``i`` covers exactly the
depth-``l`` leaf sets whose prefix has a 1 in position ``i``.  Writing ``w[v]``
for the Hamming-weight parity of the noise restricted to leaf set ``v``, row
``i`` reads ``sum_{v : v_i = 1} w[v] = S_i (mod 2)``.  The weight-one prefix
``e_i`` occurs only in row ``i``, so each such "chosen" segment's parity is fixed
by the syndrome bit and the parities of the other segments in that row.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ParityInputError, SchemeError, ShapeError
from .gf2 import BitVector
from .tree import LeafSet, TreeLayout, leaf_sets, unit_prefix

# prefix -> parity bit
ParityAssignment = dict


@dataclass(frozen=True)
class SegmentationScheme:
    """Segments are the nonempty depth-``ell`` leaf sets in descending prefix
    order.  ``chosen[i]`` is the segment index of prefix ``e_i`` and
    ``relation[i]`` the indices of non-chosen segments whose prefix has bit
    ``i`` set.  ``ell == 0`` is the unsegmented scheme: one segment, no rows.
    """

    ell: int
    n: int
    segments: tuple[LeafSet, ...]
    chosen: tuple[int, ...]
    relation: tuple[tuple[int, ...], ...]

    @property
    def non_chosen(self) -> tuple[int, ...]:
        chosen = set(self.chosen)
        return tuple(i for i in range(len(self.segments)) if i not in chosen)

    def prefix(self, seg: int) -> tuple[int, ...]:
        return self.segments[seg].prefix

    def segment_of(self) -> np.ndarray:
        """Segment index of each column."""
        out = np.empty(self.n, dtype=np.int64)
        for s, leaf in enumerate(self.segments):
            out[leaf.lo:leaf.hi] = s
        return out

    def equations(self) -> list[str]:
        """Human-readable form of the chosen-parity equations."""
        fmt = lambda seg: "w^" + "".join(map(str, self.prefix(seg)))  # noqa: E731
        return [
            f"{fmt(c)} = " + " + ".join([fmt(v) for v in rel] + [f"S{i + 1}"])
            for i, (c, rel) in enumerate(zip(self.chosen, self.relation))
        ]


def unsegmented(n: int) -> SegmentationScheme:
    return SegmentationScheme(0, n, (LeafSet((), 0, n),), (), ())


def build_scheme(layout: TreeLayout, ell: int) -> SegmentationScheme:
    """Segmentation of a tree layout using its first ``ell`` rows."""
    if ell == 0:
        return unsegmented(layout.n)
    if not 1 <= ell <= layout.m:
        raise SchemeError(f"ell={ell} outside 1..{layout.m}")
    segments = tuple(s for s in leaf_sets(layout, ell) if s.size)
    index = {s.prefix: i for i, s in enumerate(segments)}
    chosen = []
    for i in range(ell):
        e = unit_prefix(i, ell)
        if e not in index:
            raise SchemeError(f"chosen leaf set {''.join(map(str, e))} is empty")
        chosen.append(index[e])
    chosen_set = set(chosen)
    relation = tuple(
        tuple(s for s, leaf in enumerate(segments) if leaf.prefix[i] and s not in chosen_set)
        for i in range(ell)
    )
    return SegmentationScheme(ell, layout.n, segments, tuple(chosen), relation)


def segment_parities(scheme: SegmentationScheme, z: BitVector) -> ParityAssignment:
    """Hamming-weight parity of ``z`` on every segment, keyed by prefix."""
    if z.len != scheme.n:
        raise ShapeError(f"pattern length {z.len} != n = {scheme.n}")
    dense = z.to_dense()
    return {leaf.prefix: int(dense[leaf.lo:leaf.hi].sum() & 1) for leaf in scheme.segments}


def solve_chosen(
    scheme: SegmentationScheme, non_chosen: Mapping[tuple, int], s: BitVector
) -> ParityAssignment:
    """Fill in the chosen-segment parities implied by ``non_chosen`` and ``s``.

    Returns a full assignment: the given non-chosen parities plus the solved
    chosen ones.
    """
    if s.len < scheme.ell:
        raise ShapeError(f"syndrome has {s.len} bits, need at least {scheme.ell}")
    out: ParityAssignment = {}
    for seg in scheme.non_chosen:
        prefix = scheme.prefix(seg)
        if prefix not in non_chosen:
            raise ParityInputError(f"no parity given for segment {''.join(map(str, prefix))}")
        out[prefix] = int(non_chosen[prefix]) & 1
    for i, (c, rel) in enumerate(zip(scheme.chosen, scheme.relation)):
        bit = s[i]
        for v in rel:
            bit ^= out[scheme.prefix(v)]
        out[scheme.prefix(c)] = bit
    return out


def verify_pattern(scheme: SegmentationScheme, z: BitVector, s: BitVector) -> bool:
    """True iff ``z`` meets the first ``ell`` syndrome constraints."""
    if s.len < scheme.ell:
        raise ShapeError(f"syndrome has {s.len} bits, need at least {scheme.ell}")
    parity = segment_parities(scheme, z)
    for i, (c, rel) in enumerate(zip(scheme.chosen, scheme.relation)):
        total = parity[scheme.prefix(c)]
        for v in rel:
            total ^= parity[scheme.prefix(v)]
        if total != s[i]:
            return False
    return True
