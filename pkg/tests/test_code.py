import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from btt_grand.code import (
    GeneratorPolynomial,
    LinearCode,
    apply_equivalence,
    bch_code,
    bch_generator_poly,
    cyclic_code,
    cyclotomic_coset,
    encode,
    from_alist,
    matrix_from_text,
    matrix_to_text,
    poly_divmod,
    poly_mul,
    syndrome,
    to_alist,
)
from btt_grand.errors import ConstructionError, NotInvertibleError, ParseError, ShapeError
from btt_grand.gf2 import BitMatrix, BitVector, Permutation, random_invertible
from btt_grand.tree import sort_columns_tree


def poly(*exps):
    return GeneratorPolynomial.from_int(sum(1 << e for e in exps))


def all_words(code):
    return [encode(code, BitVector.from_dense(u)) for u in itertools.product([0, 1], repeat=code.k)]


def min_distance(code):
    return min(c.weight() for c in all_words(code) if c.weight())


def brute_cosets(n):
    # independent oracle: orbit of s under doubling mod n
    seen, out = set(), []
    for s in range(1, n):
        if s in seen:
            continue
        orbit, x = set(), s
        while x not in orbit:
            orbit.add(x)
            x = 2 * x % n
        seen |= orbit
        out.append(orbit)
    return out


# -- alist --

def test_alist_identity():
    text = to_alist(BitMatrix.identity(2))
    assert text == "2 2\n1 1\n1 1\n1 1\n1\n2\n1\n2\n"
    assert from_alist(text) == BitMatrix.identity(2)
    assert from_alist(text.encode()) == BitMatrix.identity(2)


def test_alist_small_matrix(small_h):
    text = "4 3\n3 3\n1 2 1 3\n2 3 2\n1\n2 3\n2\n1 2 3\n1 4\n2 3 4\n2 4\n"
    assert from_alist(text) == small_h


def test_alist_zero_row_and_padding():
    h = BitMatrix.from_dense([[1, 1, 0], [0, 0, 0]])
    text = to_alist(h)
    assert text.splitlines()[-1] == ""
    assert from_alist(text) == h
    padded = "3 2\n1 2\n1 1 0\n2 0\n1 0\n1 0\n0 0\n1 2\n0 0\n"
    assert from_alist(padded) == h


@given(st.integers(1, 10), st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_alist_roundtrip(m, n, seed):
    d = np.random.default_rng(seed).integers(0, 2, (m, n), dtype=np.uint8)
    h = BitMatrix.from_dense(d)
    assert from_alist(to_alist(h)) == h


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("4\n", 1),
    ("2 2\n1 1\n1 1\n1 1\n1\n3\n1\n2\n", 6),
    ("2 2\n1 1\n1 1\n1 1\n1\n2\n1 2\n2\n", 7),
    ("2 2\n1 1\n1 1\n1 1\n1\n2\n2\n1\n", 7),
    ("2 2\n1 1\n1 x\n1 1\n1\n2\n1\n2\n", 3),
    ("2 2\n1 1\n1 1\n1 1\n1\n2\n1\n", 8),
])
def test_alist_errors_carry_line(text, line):
    with pytest.raises(ParseError) as err:
        from_alist(text)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}:")


def test_matrix_text_roundtrip():
    a = random_invertible(5, np.random.default_rng(2))
    assert matrix_from_text(matrix_to_text(a)) == a
    with pytest.raises(ParseError):
        matrix_from_text("012\n")
    with pytest.raises(ParseError):
        matrix_from_text("01\n1\n")


# -- polynomials and BCH --

def test_poly_arith():
    assert poly_mul(0b11, 0b11) == 0b101
    q, r = poly_divmod(0b10000001, 0b1011)
    assert r == 0 and poly_mul(q, 0b1011) == 0b10000001


def test_cosets_match_orbit_oracle():
    for n in (7, 15, 31, 63, 127):
        got = {frozenset(cyclotomic_coset(s, n)) for s in range(1, n)}
        assert got == {frozenset(o) for o in brute_cosets(n)}


def test_bch_generator_examples():
    assert bch_generator_poly(3, 1, 0b1011).as_int() == 0b1011
    assert bch_generator_poly(5, 2).degree == 10
    assert bch_generator_poly(7, 3).degree == 21
    with pytest.raises(ConstructionError):
        bch_generator_poly(4, 1, 0b11111)  # x^4+x^3+x^2+x+1 has order 5


def test_bch_generator_degree_equals_coset_sizes():
    for p, t in [(4, 2), (5, 3), (6, 2), (7, 3), (8, 4)]:
        n = (1 << p) - 1
        union = set()
        for i in range(1, 2 * t, 2):
            union |= set(cyclotomic_coset(i, n))
        g = bch_generator_poly(p, t)
        assert g.degree == len(union)
        assert g.coefficients[0] == 1 and g.coefficients[-1] == 1


@pytest.mark.parametrize("n,k,d", [(7, 4, 3), (15, 7, 5), (15, 11, 3), (31, 21, 5)])
def test_bch_codes(n, k, d):
    code = bch_code(n, k)
    assert (code.n, code.k, code.m) == (n, k, n - k)
    if k <= 12:
        assert min_distance(code) >= d


def test_bch_127_106_dimensions():
    code = bch_code(127, 106)
    assert (code.n, code.k, code.m) == (127, 106, 21)


def test_cyclic_code_examples():
    ham = cyclic_code(7, poly(3, 1, 0))
    words = all_words(ham)
    assert len(set(words)) == 16 and min_distance(ham) == 3
    spc = cyclic_code(7, poly(1, 0))
    assert spc.k == 6
    assert all(c.weight() % 2 == 0 for c in all_words(spc))
    with pytest.raises(ConstructionError):
        cyclic_code(7, poly(2, 0))


def test_cyclic_code_is_cyclic():
    code = bch_code(15, 7)
    for c in all_words(code)[:40]:
        shifted = BitVector.from_dense(np.roll(c.to_dense(), 1))
        assert not syndrome(code, shifted).weight()


# -- LinearCode --

def test_linear_code_rejects_inconsistent_pair():
    h = BitMatrix.from_dense([[1, 1, 1]])
    g = BitMatrix.from_dense([[1, 0, 0], [0, 1, 0]])
    with pytest.raises(ConstructionError):
        LinearCode(g, h)


def test_encode_examples():
    code = bch_code(7, 4)
    assert encode(code, BitVector.zeros(4)) == BitVector.zeros(7)
    for i in range(4):
        assert encode(code, BitVector.from_indices(4, [i])) == code.G.row(i)
    words = all_words(code)
    assert len(set(words)) == 16
    assert all(not syndrome(code, c).weight() for c in words)
    with pytest.raises(ShapeError):
        encode(code, BitVector.zeros(5))


@given(st.integers(0, 2**32 - 1))
def test_syndrome_linearity(seed):
    rng = np.random.default_rng(seed)
    code = bch_code(15, 7)
    u = BitVector.from_dense(rng.integers(0, 2, 7))
    z = BitVector.from_dense(rng.integers(0, 2, 15))
    y2 = BitVector.from_dense(rng.integers(0, 2, 15))
    assert syndrome(code, encode(code, u) ^ z) == syndrome(code, z)
    assert syndrome(code, z ^ y2) == syndrome(code, z) ^ syndrome(code, y2)
    j = int(rng.integers(15))
    assert syndrome(code, encode(code, u) ^ BitVector.from_indices(15, [j])) == code.H.column(j)


def test_apply_equivalence_identity_and_sorted(small_h):
    code = bch_code(7, 4)
    same = apply_equivalence(code, BitMatrix.identity(3), Permutation.identity(7))
    assert same.H == code.H and same.G == code.G
    small = LinearCode.from_parity_check(small_h)
    layout = sort_columns_tree(small_h)
    moved = apply_equivalence(small, BitMatrix.identity(3), layout.perm)
    assert moved.H.column_values() == [7, 4, 3, 2]
    with pytest.raises(NotInvertibleError):
        apply_equivalence(code, BitMatrix.zeros(3, 3), Permutation.identity(7))


@given(st.integers(0, 2**32 - 1))
def test_apply_equivalence_preserves_codebook(seed):
    rng = np.random.default_rng(seed)
    code = bch_code(7, 4)
    a = random_invertible(3, rng)
    perm = Permutation(rng.permutation(7))
    new = apply_equivalence(code, a, perm)
    assert new.codebook() == {perm.apply(c) for c in code.codebook()}
    dist = sorted((x ^ y).weight() for x, y in itertools.combinations(code.codebook(), 2))
    dist2 = sorted((x ^ y).weight() for x, y in itertools.combinations(new.codebook(), 2))
    assert dist == dist2


def test_from_parity_check_drops_dependent_rows():
    h = BitMatrix.from_dense([[1, 1, 0, 1], [0, 1, 1, 1], [1, 0, 1, 0]])
    code = LinearCode.from_parity_check(h)
    assert code.m == 2 and code.k == 2
