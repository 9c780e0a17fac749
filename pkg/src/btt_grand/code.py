"""Binary linear codes: consistent G/H pairs, alist I/O and BCH construction."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConstructionError, NotInvertibleError, ParseError, ShapeError
from .gf2 import (
    BitMatrix,
    BitVector,
    Permutation,
    is_invertible,
    mat_mul,
    mat_vec,
    nullspace,
    rank,
    vec_mat,
)

# Primitive polynomials as integers (bit i = coefficient of x^i).
DEFAULT_PRIMITIVE = {
    2: 0b111,            # x^2 + x + 1
    3: 0b1011,           # x^3 + x + 1
    4: 0b10011,          # x^4 + x + 1
    5: 0b100101,         # x^5 + x^2 + 1
    6: 0b1000011,        # x^6 + x + 1
    7: 0b10001001,       # x^7 + x^3 + 1
    8: 0b100011101,      # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,     # x^9 + x^4 + 1
    10: 0b10000001001,   # x^10 + x^3 + 1
}


@dataclass(frozen=True)
class LinearCode:
    """An (n, k) binary linear code with generator ``G`` (k x n) and parity
    check matrix ``H`` (m x n).  Construction verifies ``G H^T = 0`` and the
    rank conditions."""

    G: BitMatrix
    H: BitMatrix

    def __post_init__(self):
        if self.G.cols != self.H.cols:
            raise ConstructionError("G and H have different block lengths")
        if self.G.rows + self.H.rows != self.G.cols:
            raise ConstructionError(
                f"k + m = {self.G.rows} + {self.H.rows} != n = {self.G.cols}"
            )
        if rank(self.G) != self.G.rows:
            raise ConstructionError("G does not have full row rank")
        if rank(self.H) != self.H.rows:
            raise ConstructionError("H does not have full row rank")
        if mat_mul(self.G, self.H.transpose()) != BitMatrix.zeros(self.G.rows, self.H.rows):
            raise ConstructionError("G H^T != 0")

    @property
    def n(self) -> int:
        return self.G.cols

    @property
    def k(self) -> int:
        return self.G.rows

    @property
    def m(self) -> int:
        return self.H.rows

    @property
    def rate(self) -> float:
        return self.k / self.n

    @classmethod
    def from_parity_check(cls, h: BitMatrix) -> "LinearCode":
        """Build a code from ``h``; linearly dependent rows are dropped."""
        reduced, pivots = _independent_rows(h)
        g = nullspace(reduced)
        if g is None:
            raise ConstructionError("parity check matrix leaves only the zero codeword")
        return cls(g, reduced)

    @classmethod
    def from_generator(cls, g: BitMatrix) -> "LinearCode":
        reduced, _ = _independent_rows(g)
        h = nullspace(reduced)
        if h is None:
            raise ConstructionError("generator spans the whole space; no parity checks")
        return cls(reduced, h)

    @cached_property
    def column_syndromes(self) -> list[int]:
        """Each column of H as an integer with row ``i`` at bit ``i``."""
        dense = self.H.to_dense()
        weights = 1 << np.arange(self.m, dtype=object)
        return [int(sum(weights[dense[:, j] == 1])) for j in range(self.n)]

    def codebook(self) -> set[BitVector]:
        """All 2^k codewords; only sensible for small k."""
        if self.k > 20:
            raise ValueError(f"codebook of dimension {self.k} is too large to enumerate")
        words = {0}
        for r in range(self.k):
            row = self.G.row(r).to_int()
            words |= {w ^ row for w in words}
        return {BitVector.from_int(self.n, w) for w in words}


def _independent_rows(a: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Keep a maximal set of linearly independent rows of ``a``, in order."""
    keep: list[int] = []
    for i in range(a.rows):
        trial = keep + [i]
        if rank(BitMatrix.from_dense(a.to_dense()[trial])) == len(trial):
            keep = trial
    if not keep:
        raise ConstructionError("matrix is all zero")
    return BitMatrix.from_dense(a.to_dense()[keep]), keep


def encode(code: LinearCode, u: BitVector) -> BitVector:
    """Codeword ``u G``."""
    if u.len != code.k:
        raise ShapeError(f"message length {u.len} != k = {code.k}")
    return vec_mat(u, code.G)


def syndrome(code: LinearCode, y: BitVector) -> BitVector:
    """``H y^T``."""
    if y.len != code.n:
        raise ShapeError(f"word length {y.len} != n = {code.n}")
    return mat_vec(code.H, y)


def apply_equivalence(code: LinearCode, a: BitMatrix, perm: Permutation) -> LinearCode:
    """Equivalent code with ``H' = (a H)[:, perm]`` and ``G' = G[:, perm]``.

    Codeword ``c`` of the original maps to ``perm.apply(c)``.
    """
    if a.shape != (code.m, code.m):
        raise ShapeError(f"transform must be {code.m}x{code.m}, got {a.rows}x{a.cols}")
    if not is_invertible(a):
        raise NotInvertibleError("row transform is singular")
    return LinearCode(code.G.permute_columns(perm), mat_mul(a, code.H).permute_columns(perm))


# -- polynomials over GF(2), stored as ints with bit i = coefficient of x^i --

def _deg(p: int) -> int:
    return p.bit_length() - 1


def poly_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = 0
    db = _deg(b)
    while a and _deg(a) >= db:
        shift = _deg(a) - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


def _to_int(coeffs) -> int:
    return sum(int(c & 1) << i for i, c in enumerate(coeffs))


def _to_coeffs(p: int) -> tuple[int, ...]:
    return tuple((p >> i) & 1 for i in range(_deg(p) + 1))


@dataclass(frozen=True)
class GeneratorPolynomial:
    """Binary polynomial, coefficients listed low order first."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coefficients)
        if not coeffs or coeffs[-1] != 1 or any(c not in (0, 1) for c in coeffs):
            raise ConstructionError("coefficients must be binary with a leading 1")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_int(cls, p: int) -> "GeneratorPolynomial":
        return cls(_to_coeffs(p))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def as_int(self) -> int:
        return _to_int(self.coefficients)

    def __str__(self) -> str:
        terms = [("1" if i == 0 else "x" if i == 1 else f"x^{i}")
                 for i, c in reversed(list(enumerate(self.coefficients))) if c]
        return " + ".join(terms)


def _gf_tables(p: int, prim: int) -> tuple[list[int], list[int]]:
    """exp/log tables of GF(2^p) generated by a root of ``prim``."""
    if _deg(prim) != p:
        raise ConstructionError(f"polynomial degree {_deg(prim)} != {p}")
    order = (1 << p) - 1
    exp = [0] * (2 * order)
    log = [-1] * (1 << p)
    x = 1
    for i in range(order):
        if log[x] != -1:
            raise ConstructionError(f"polynomial {prim:#b} is not primitive")
        exp[i] = x
        log[x] = i
        x <<= 1
        if x >> p:
            x ^= prim
    if x != 1:
        raise ConstructionError(f"polynomial {prim:#b} is not primitive")
    for i in range(order, 2 * order):
        exp[i] = exp[i - order]
    return exp, log


def cyclotomic_coset(s: int, n: int) -> list[int]:
    coset = [s % n]
    while (coset[-1] * 2) % n != coset[0]:
        coset.append((coset[-1] * 2) % n)
    return coset


def _minimal_poly(coset: list[int], exp: list[int], log: list[int], order: int) -> int:
    # product of (x + alpha^j) with GF(2^p) coefficients, low order first
    poly = [1]
    for j in coset:
        root = exp[j % order]
        nxt = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] ^= c
            if c:
                nxt[i] ^= exp[(log[c] + log[root]) % order]
        poly = nxt
    if any(c not in (0, 1) for c in poly):
        raise ConstructionError("minimal polynomial has non-binary coefficients")
    return _to_int(poly)


def bch_generator_poly(p: int, t: int, primitive_poly=None) -> GeneratorPolynomial:
    """Narrow-sense primitive BCH generator: lcm of the minimal polynomials of
    alpha, alpha^3, ..., alpha^(2t-1) in GF(2^p).

    ``primitive_poly`` may be an int or a low-order-first coefficient sequence;
    defaults to :data:`DEFAULT_PRIMITIVE`.
    """
    if not 2 <= p <= 10:
        raise ConstructionError(f"field degree p={p} outside 2..10")
    n = (1 << p) - 1
    if t < 1 or 2 * t + 1 > n:
        raise ConstructionError(f"designed distance {2 * t + 1} not achievable for n={n}")
    if primitive_poly is None:
        prim = DEFAULT_PRIMITIVE[p]
    elif isinstance(primitive_poly, int):
        prim = primitive_poly
    else:
        prim = _to_int(primitive_poly)
    exp, log = _gf_tables(p, prim)
    g = 1
    seen: set[int] = set()
    for s in range(1, 2 * t, 2):
        if s % n in seen:
            continue
        coset = cyclotomic_coset(s, n)
        seen.update(coset)
        g = poly_mul(g, _minimal_poly(coset, exp, log, n))
    return GeneratorPolynomial.from_int(g)


def cyclic_code(n: int, g: GeneratorPolynomial) -> LinearCode:
    """Cyclic code of length ``n`` generated by ``g``.

    G holds the ``k`` shifts of ``g``; H holds the shifts of the reciprocal of
    the parity polynomial ``h = (x^n + 1) / g``.
    """
    gi = g.as_int()
    h, rem = poly_divmod((1 << n) | 1, gi)
    if rem:
        raise ConstructionError(f"g(x) = {g} does not divide x^{n} + 1")
    k = n - g.degree
    m = g.degree
    if k < 1 or m < 1:
        raise ConstructionError(f"degenerate cyclic code (n={n}, deg g={m})")
    gd = np.zeros((k, n), dtype=np.uint8)
    gc = np.array(g.coefficients, dtype=np.uint8)
    for i in range(k):
        gd[i, i:i + m + 1] = gc
    hc = np.array(_to_coeffs(h)[::-1], dtype=np.uint8)  # reciprocal of h
    hd = np.zeros((m, n), dtype=np.uint8)
    for i in range(m):
        hd[i, i:i + k + 1] = hc
    return LinearCode(BitMatrix.from_dense(gd), BitMatrix.from_dense(hd))


def bch_code(n: int, k: int, primitive_poly=None) -> LinearCode:
    """Primitive narrow-sense BCH(n, k), choosing the designed ``t`` whose
    generator has degree ``n - k``."""
    p = (n + 1).bit_length() - 1
    if (1 << p) - 1 != n:
        raise ConstructionError(f"n={n} is not of the form 2^p - 1")
    for t in range(1, n // 2 + 1):
        if 2 * t + 1 > n:
            break
        g = bch_generator_poly(p, t, primitive_poly)
        if g.degree == n - k:
            return cyclic_code(n, g)
        if g.degree > n - k:
            break
    raise ConstructionError(f"no narrow-sense BCH code with parameters ({n}, {k})")


# -- alist --

def to_alist(h: BitMatrix) -> str:
    """Serialize ``h`` as alist text (1-based indices, no zero padding)."""
    dense = h.to_dense()
    m, n = dense.shape
    cols = [np.flatnonzero(dense[:, j]) + 1 for j in range(n)]
    rows = [np.flatnonzero(dense[i]) + 1 for i in range(m)]
    lines = [
        f"{n} {m}",
        f"{max(len(c) for c in cols)} {max(len(r) for r in rows)}",
        " ".join(str(len(c)) for c in cols),
        " ".join(str(len(r)) for r in rows),
    ]
    lines += [" ".join(map(str, c)) for c in cols]
    lines += [" ".join(map(str, r)) for r in rows]
    return "\n".join(lines) + "\n"


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise ParseError(f"non-integer token in {line!r}", lineno) from None


def from_alist(text: str | bytes) -> BitMatrix:
    """Parse alist text into a parity check matrix.

    Column and row index lists may carry trailing zero padding.  Both lists
    are required and must describe the same set of ones.
    """
    if isinstance(text, bytes):
        text = text.decode()
    lines = text.splitlines()

    def line(idx: int) -> list[int]:
        if idx >= len(lines):
            raise ParseError("unexpected end of input", idx + 1)
        return _ints(lines[idx], idx + 1)

    header = line(0)
    if len(header) != 2 or min(header) < 1:
        raise ParseError("header must be 'n m' with positive values", 1)
    n, m = header
    maxw = line(1)
    if len(maxw) != 2:
        raise ParseError("expected max column and row weights", 2)
    col_w = line(2)
    row_w = line(3)
    if len(col_w) != n:
        raise ParseError(f"expected {n} column weights, got {len(col_w)}", 3)
    if len(row_w) != m:
        raise ParseError(f"expected {m} row weights, got {len(row_w)}", 4)
    if max(col_w) != maxw[0] or max(row_w) != maxw[1]:
        raise ParseError("max weights disagree with weight lists", 2)
    if sum(col_w) != sum(row_w):
        raise ParseError("column and row weight totals differ", 4)

    dense = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        lineno = 5 + j
        idx = [v for v in line(4 + j) if v != 0]
        if len(idx) != col_w[j]:
            raise ParseError(f"column {j + 1} lists {len(idx)} entries, weight is {col_w[j]}", lineno)
        for v in idx:
            if not 1 <= v <= m:
                raise ParseError(f"row index {v} out of range 1..{m}", lineno)
            if dense[v - 1, j]:
                raise ParseError(f"duplicate row index {v}", lineno)
            dense[v - 1, j] = 1
    for i in range(m):
        lineno = 5 + n + i
        idx = [v for v in line(4 + n + i) if v != 0]
        if len(idx) != row_w[i]:
            raise ParseError(f"row {i + 1} lists {len(idx)} entries, weight is {row_w[i]}", lineno)
        for v in idx:
            if not 1 <= v <= n:
                raise ParseError(f"column index {v} out of range 1..{n}", lineno)
            if not dense[i, v - 1]:
                raise ParseError(f"row list has ({i + 1}, {v}) but column list does not", lineno)
    return BitMatrix.from_dense(dense)


def matrix_to_text(a: BitMatrix) -> str:
    """One row per line as 0/1 characters."""
    return "\n".join("".join(map(str, r)) for r in a.to_dense()) + "\n"


def matrix_from_text(text: str) -> BitMatrix:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not rows or any(set(r) - {"0", "1"} for r in rows):
        raise ParseError("expected lines of 0/1 characters")
    if len({len(r) for r in rows}) != 1:
        raise ParseError("rows have different lengths")
    return BitMatrix.from_dense([[int(c) for c in r] for r in rows])
