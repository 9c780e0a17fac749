"""
Dense GF(2) linear algebra on bit-packed rows.

Rows are packed little-endian into ``uint64`` words: bit ``j`` of a row lives
in word ``j // 64`` at bit position ``j % 64``.  Padding bits past the last
column are always zero, so word-wise equality is entrywise equality.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import NotInvertibleError, SamplingError, ShapeError

WORD = 64


def _nwords(n: int) -> int:
    return max(1, (n + WORD - 1) // WORD)


def _pad_mask(n: int) -> np.ndarray:
    """Per-word masks keeping only the valid bits of an ``n``-bit row."""
    nw = _nwords(n)
    mask = np.full(nw, np.iinfo(np.uint64).max, dtype=np.uint64)
    rem = n % WORD
    if rem:
        mask[-1] = np.uint64((1 << rem) - 1)
    if n == 0:
        mask[:] = 0
    return mask


def pack_bits(dense: np.ndarray) -> np.ndarray:
    """Pack a (..., n) 0/1 array into (..., nwords) uint64 words."""
    dense = np.asarray(dense)
    n = dense.shape[-1]
    nw = _nwords(n)
    padded = np.zeros(dense.shape[:-1] + (nw * WORD,), dtype=np.uint8)
    padded[..., :n] = dense & 1
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns uint8 of shape (..., n)."""
    words = np.ascontiguousarray(words, dtype="<u8")
    as_bytes = words.view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=-1, bitorder="little")
    return bits[..., :n]


class BitVector:
    """Packed binary vector of fixed length."""

    __slots__ = ("len", "words")

    def __init__(self, length: int, words: np.ndarray):
        words = np.asarray(words, dtype=np.uint64)
        if words.shape != (_nwords(length),):
            raise ShapeError(f"expected {_nwords(length)} words for length {length}")
        self.len = length
        self.words = words & _pad_mask(length)
        self.words.flags.writeable = False

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, np.zeros(_nwords(length), dtype=np.uint64))

    @classmethod
    def from_dense(cls, bits: Sequence[int] | np.ndarray) -> "BitVector":
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise ShapeError("BitVector.from_dense expects a 1-D array")
        return cls(bits.shape[0], pack_bits(bits))

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> "BitVector":
        dense = np.zeros(length, dtype=np.uint8)
        idx = np.fromiter(indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= length):
            raise ShapeError("index out of range")
        dense[idx] ^= 1
        return cls.from_dense(dense)

    @classmethod
    def from_int(cls, length: int, value: int) -> "BitVector":
        """Bit ``j`` of the vector is bit ``j`` of ``value``."""
        return cls.from_indices(length, (j for j in range(length) if value >> j & 1))

    def to_dense(self) -> np.ndarray:
        return unpack_bits(self.words, self.len)

    def to_int(self) -> int:
        return sum(int(w) << (WORD * i) for i, w in enumerate(self.words))

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.to_dense())

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def dot(self, other: "BitVector") -> int:
        """Inner product mod 2."""
        if other.len != self.len:
            raise ShapeError(f"length mismatch: {self.len} vs {other.len}")
        return int(np.bitwise_count(self.words & other.words).sum()) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        if other.len != self.len:
            raise ShapeError(f"length mismatch: {self.len} vs {other.len}")
        return BitVector(self.len, self.words ^ other.words)

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.len:
            raise IndexError(j)
        return int(self.words[j // WORD] >> np.uint64(j % WORD)) & 1

    def __len__(self) -> int:
        return self.len

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.len == other.len and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.len, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitVector('{''.join(map(str, self.to_dense()))}')"


class BitMatrix:
    """Dense binary matrix over GF(2), rows packed into uint64 words.

    Instances are treated as immutable; every operation returns a new matrix.
    """

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        if rows < 1 or cols < 1:
            raise ShapeError(f"matrix must be at least 1x1, got {rows}x{cols}")
        words = np.asarray(words, dtype=np.uint64)
        if words.shape != (rows, _nwords(cols)):
            raise ShapeError(f"word array has shape {words.shape}")
        self.rows = rows
        self.cols = cols
        self.words = words & _pad_mask(cols)
        self.words.flags.writeable = False

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        dense = np.asarray(dense, dtype=np.uint8)
        if dense.ndim != 2:
            raise ShapeError("BitMatrix.from_dense expects a 2-D array")
        return cls(dense.shape[0], dense.shape[1], pack_bits(dense))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, _nwords(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_dense(self) -> np.ndarray:
        return unpack_bits(self.words, self.cols)

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.words[i].copy())

    def column(self, j: int) -> BitVector:
        return BitVector.from_dense(self.to_dense()[:, j])

    def column_values(self) -> list[int]:
        """Integer value of each column, top row as the most significant bit."""
        dense = self.to_dense()
        values = [0] * self.cols
        for i in range(self.rows):
            row = dense[i]
            for j in range(self.cols):
                values[j] = (values[j] << 1) | int(row[j])
        return values

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def permute_columns(self, perm: "Permutation") -> "BitMatrix":
        """New column ``j`` is old column ``perm.map[j]``."""
        if len(perm) != self.cols:
            raise ShapeError(f"permutation of {len(perm)} applied to {self.cols} columns")
        return BitMatrix.from_dense(self.to_dense()[:, perm.map])

    def row_slice(self, start: int, stop: int) -> "BitMatrix":
        return BitMatrix(stop - start, self.cols, self.words[start:stop].copy())

    def hstack(self, other: "BitMatrix") -> "BitMatrix":
        if other.rows != self.rows:
            raise ShapeError("row counts differ")
        return BitMatrix.from_dense(np.hstack([self.to_dense(), other.to_dense()]))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return int(self.words[i, j // WORD] >> np.uint64(j % WORD)) & 1

    def __matmul__(self, other):
        if isinstance(other, BitMatrix):
            return mat_mul(self, other)
        if isinstance(other, BitVector):
            return mat_vec(self, other)
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        body = "\n".join(" " + "".join(map(str, r)) for r in self.to_dense())
        return f"BitMatrix({self.rows}x{self.cols}\n{body})"


class Permutation:
    """Bijection on ``{0, ..., len-1}``.

    Applied to a sequence ``x`` it gathers: ``apply(x)[j] == x[map[j]]``.
    """

    __slots__ = ("map",)

    def __init__(self, mapping: Sequence[int] | np.ndarray):
        arr = np.asarray(mapping, dtype=np.int64)
        if arr.ndim != 1 or not np.array_equal(np.sort(arr), np.arange(arr.size)):
            raise ValueError("mapping is not a permutation")
        arr.flags.writeable = False
        self.map = arr

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    def inverse(self) -> "Permutation":
        return Permutation(np.argsort(self.map, kind="stable"))

    def then(self, other: "Permutation") -> "Permutation":
        """Permutation equal to applying ``self`` first, then ``other``."""
        if len(other) != len(self):
            raise ShapeError("permutation sizes differ")
        return Permutation(self.map[other.map])

    def apply(self, x):
        if isinstance(x, BitVector):
            if x.len != len(self):
                raise ShapeError("vector length differs from permutation size")
            return BitVector.from_dense(x.to_dense()[self.map])
        return np.asarray(x)[self.map]

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.map, np.arange(self.map.size)))

    def __len__(self) -> int:
        return int(self.map.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return bool(np.array_equal(self.map, other.map))

    def __hash__(self) -> int:
        return hash(self.map.tobytes())

    def __repr__(self) -> str:
        return f"Permutation({self.map.tolist()})"


def mat_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """GF(2) product: row ``i`` of the result is the XOR of rows of ``b``
    selected by the ones in row ``i`` of ``a``."""
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    sel = a.to_dense().astype(bool)
    picked = np.where(sel[:, :, None], b.words[None, :, :], np.uint64(0))
    return BitMatrix(a.rows, b.cols, np.bitwise_xor.reduce(picked, axis=1))


def mat_vec(a: BitMatrix, v: BitVector) -> BitVector:
    """``a @ v`` over GF(2), e.g. a syndrome ``H y^T``."""
    if a.cols != v.len:
        raise ShapeError(f"cannot multiply {a.rows}x{a.cols} by vector of length {v.len}")
    parity = np.bitwise_count(a.words & v.words[None, :]).sum(axis=1) & 1
    return BitVector.from_dense(parity.astype(np.uint8))


def vec_mat(v: BitVector, a: BitMatrix) -> BitVector:
    """``v @ a`` over GF(2): XOR of the rows of ``a`` picked by ``v``."""
    if v.len != a.rows:
        raise ShapeError(f"cannot multiply vector of length {v.len} by {a.rows}x{a.cols}")
    sel = v.to_dense().astype(bool)
    acc = np.bitwise_xor.reduce(a.words[sel], axis=0) if sel.any() else np.zeros(
        a.words.shape[1], dtype=np.uint64
    )
    return BitVector(a.cols, acc)


def _eliminate(words: np.ndarray, cols: int, full: bool) -> list[int]:
    """In-place row reduction of ``words``; returns pivot columns.

    With ``full`` the result is reduced row echelon form, otherwise only the
    entries below each pivot are cleared.
    """
    nrows = words.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == nrows:
            break
        w, bit = divmod(c, WORD)
        mask = np.uint64(1) << np.uint64(bit)
        hits = np.flatnonzero(words[r:, w] & mask)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        has = (words[:, w] & mask) != 0
        has[r] = False
        if not full:
            has[:r] = False
        words[has] ^= words[r]
        pivots.append(c)
        r += 1
    return pivots


def rank(a: BitMatrix) -> int:
    """Row rank over GF(2)."""
    return len(_eliminate(a.words.copy(), a.cols, full=False))


def rref(a: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form and its pivot columns."""
    words = a.words.copy()
    pivots = _eliminate(words, a.cols, full=True)
    return BitMatrix(a.rows, a.cols, words), pivots


def invert(a: BitMatrix) -> BitMatrix:
    """Inverse of a square matrix; raises NotInvertibleError if singular."""
    if a.rows != a.cols:
        raise ShapeError(f"cannot invert non-square {a.rows}x{a.cols} matrix")
    m = a.rows
    aug = a.hstack(BitMatrix.identity(m))
    words = aug.words.copy()
    pivots = _eliminate(words, m, full=True)
    if len(pivots) < m:
        raise NotInvertibleError(f"matrix has rank {len(pivots)} < {m}")
    return BitMatrix.from_dense(unpack_bits(words, 2 * m)[:, m:])


def nullspace(a: BitMatrix) -> BitMatrix | None:
    """Basis of ``{x : a x^T = 0}`` as rows, or None if only the zero vector."""
    reduced, pivots = rref(a)
    free = [c for c in range(a.cols) if c not in set(pivots)]
    if not free:
        return None
    dense = reduced.to_dense()
    basis = np.zeros((len(free), a.cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = dense[r, f]
    return BitMatrix.from_dense(basis)


def random_matrix(m: int, n: int, rng: np.random.Generator) -> BitMatrix:
    """Matrix with i.i.d. Bernoulli(1/2) entries drawn from ``rng``."""
    words = rng.integers(0, np.iinfo(np.uint64).max, size=(m, _nwords(n)),
                         dtype=np.uint64, endpoint=True)
    return BitMatrix(m, n, words)


def is_invertible(a: BitMatrix) -> bool:
    return a.rows == a.cols and rank(a) == a.rows


def random_invertible(m: int, rng: np.random.Generator, max_attempts: int = 1000) -> BitMatrix:
    """Uniformly random invertible ``m x m`` matrix by rejection sampling."""
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    for _ in range(max_attempts):
        a = random_matrix(m, m, rng)
        if is_invertible(a):
            return a
    raise SamplingError(f"no invertible {m}x{m} matrix in {max_attempts} attempts")


def invertible_probability(m: int) -> float:
    """Probability that a uniform ``m x m`` binary matrix is invertible."""
    return float(np.prod([1.0 - 2.0 ** -i for i in range(1, m + 1)]))
