import hashlib
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ezk.errors import InvalidArgument, RankDeficient
from ezk.primitives import (BitVector, DeterministicRng, GF2Matrix, PrgSpec, ToeplitzHash,
                            TAG_PRG, gf2_solve, prg_expand, universal_hash_eval,
                            universal_hash_sample_preimage, xof)
from ezk.primitives.prg import XOF_MODE


def dense_mul(rows, x):
    """Naive GF(2) product over explicit 0/1 lists."""
    return [sum(a * b for a, b in zip(r, x)) % 2 for r in rows]


# --- bit vectors ---------------------------------------------------------------------------

@given(st.lists(st.integers(0, 1), max_size=70))
def test_bitvector_roundtrip_bytes(bits):
    v = BitVector.from_bits(bits)
    assert v.to_list() == bits
    assert BitVector.from_bytes(v.to_bytes(), len(bits)) == v


@given(st.lists(st.integers(0, 1), min_size=1, max_size=40), st.lists(st.integers(0, 1), max_size=40))
def test_concat_and_slice(a, b):
    va, vb = BitVector.from_bits(a), BitVector.from_bits(b)
    c = va + vb
    assert c.to_list() == a + b
    assert c[:len(a)] == va and c[len(a):] == vb


def test_bit_packing_is_lsb_first():
    assert BitVector.from_str("10000000" + "01").to_bytes() == bytes([1, 2])


def test_padding_bits_rejected():
    with pytest.raises(InvalidArgument):
        BitVector.from_bytes(b"\x80", 7)
    with pytest.raises(InvalidArgument):
        BitVector(4, 2)


# --- PRG -----------------------------------------------------------------------------------

def test_linear_prg_zero_seed(rng):
    spec = PrgSpec.random_linear(8, 24, rng)
    assert prg_expand(spec, BitVector.zeros(8)) == BitVector.zeros(24)


def test_linear_prg_hand_multiply():
    rows = [[1, 0], [0, 1], [1, 1], [1, 0], [0, 1], [1, 1]]
    spec = PrgSpec.linear(GF2Matrix.from_lists(rows))
    out = prg_expand(spec, BitVector.from_str("11"))
    assert str(out) == "110110"
    assert out.to_list() == dense_mul(rows, [1, 1])


def test_xof_prg_golden_vector():
    spec = PrgSpec(XOF_MODE, 8, 24)
    seed = BitVector(0xA5, 8)
    # independent reconstruction straight from hashlib's SHAKE256
    h = hashlib.shake_256(bytes([TAG_PRG]) + (1).to_bytes(4, "big") + bytes([0xA5]))
    expect = int.from_bytes(h.digest(3), "little")
    assert prg_expand(spec, seed).value == expect
    assert xof(TAG_PRG, b"\x03", out_len=16).hex() == "10c5cdf3523b1ad3f29f541712a80110"


def test_xof_domain_separation():
    assert xof(1, b"ab", b"c") != xof(1, b"a", b"bc")
    assert xof(1, b"x") != xof(2, b"x")


# --- Toeplitz hashing ----------------------------------------------------------------------

def _toeplitz_dense(f: ToeplitzHash):
    d = f.diag.to_list()
    return [[d[i - j + f.in_len - 1] for j in range(f.in_len)] for i in range(f.out_len)]


def test_zero_diag_hash():
    f = ToeplitzHash(10, 3, BitVector.zeros(12), BitVector.zeros(3))
    assert universal_hash_eval(f, BitVector(0x2F5, 10)) == BitVector.zeros(3)


def _projection(n, L):
    # T[i][j] = diag[i - j + L - 1]; selecting r_i needs diag[L - 1] = 1 only
    return ToeplitzHash(L, n, BitVector(1 << (L - 1), L + n - 1), BitVector.zeros(n))


def test_projection_hash_and_preimage(rng):
    f = _projection(4, 10)
    m = BitVector(0b1011, 4)
    junk = BitVector(0b101101, 6)
    assert universal_hash_eval(f, m + junk) == m
    for _ in range(20):
        r = universal_hash_sample_preimage(f, m, rng)
        assert r[:4] == m


@settings(max_examples=60)
@given(st.integers(1, 20), st.integers(1, 8), st.integers(0, 2**32))
def test_hash_matches_dense_oracle(L, n, seed):
    g = DeterministicRng(seed)
    f = ToeplitzHash.random(L, n, g)
    r = g.bitvector(L)
    expect = [a ^ b for a, b in zip(dense_mul(_toeplitz_dense(f), r.to_list()), f.offset.to_list())]
    assert universal_hash_eval(f, r).to_list() == expect


@settings(max_examples=40)
@given(st.integers(0, 2**32))
def test_preimage_postcondition(seed):
    g = DeterministicRng(seed)
    f = ToeplitzHash.random(16, 4, g)
    if not f.is_full_rank():
        with pytest.raises(RankDeficient):
            universal_hash_sample_preimage(f, BitVector.zeros(4), g)
        return
    r0 = g.bitvector(16)
    m = universal_hash_eval(f, r0)
    assert universal_hash_eval(f, universal_hash_sample_preimage(f, m, g)) == m


@pytest.mark.slow
def test_preimage_sampler_is_uniform_over_all_solutions():
    g = DeterministicRng(2024)
    while True:
        f = ToeplitzHash.random(14, 2, g)
        if f.is_full_rank():
            break
    m = BitVector(0b10, 2)
    solutions = {r for r in range(1 << 14) if universal_hash_eval(f, BitVector(r, 14)) == m}
    assert len(solutions) == 1 << 12
    draws = 10**6
    counts = Counter(universal_hash_sample_preimage(f, m, g).value for _ in range(draws))
    assert set(counts) <= solutions
    p = 2.0**-12
    mean, sigma = draws * p, math.sqrt(draws * p * (1 - p))
    # per-solution 3-sigma band, widened by the union over 4096 cells to the 5-sigma tail
    assert all(abs(counts.get(r, 0) - mean) <= 5 * sigma for r in solutions)
    z = [(counts.get(r, 0) - mean) / sigma for r in solutions]
    assert abs(np.mean(z)) < 0.1 and 0.9 < np.var(z) < 1.1
    assert np.mean(np.abs(z) <= 3) > 0.99


# --- GF(2) solving -------------------------------------------------------------------------

def test_solve_identity():
    b = BitVector(0b1101, 4)
    particular, kernel = gf2_solve(GF2Matrix.identity(4), b)
    assert particular == b and kernel == []


def test_solve_zero_matrix():
    particular, kernel = gf2_solve(GF2Matrix.zero(3, 5), BitVector.zeros(3))
    assert particular == BitVector.zeros(5)
    assert sorted(k.value for k in kernel) == [1 << i for i in range(5)]


def test_solve_inconsistent():
    A = GF2Matrix.from_lists([[1, 1], [1, 1]])
    assert gf2_solve(A, BitVector.from_str("10")) is None


@settings(max_examples=80)
@given(st.integers(0, 2**32))
def test_solve_random_8x12_multiply_back(seed):
    g = DeterministicRng(seed)
    A = GF2Matrix.random(8, 12, g)
    x0 = g.bitvector(12)
    b = A.mul_vec(x0)
    particular, kernel = gf2_solve(A, b)
    assert A.mul_vec(particular) == b
    for k in kernel:
        assert A.mul_vec(k) == BitVector.zeros(8)
    assert len(kernel) == 12 - A.rank()


@settings(max_examples=30)
@given(st.integers(1, 30), st.integers(1, 30), st.integers(0, 2**32))
def test_rank_matches_numpy_over_gf2(rows, cols, seed):
    A = GF2Matrix.random(rows, cols, DeterministicRng(seed))
    M = A.to_numpy().astype(int)
    # oracle: plain Gaussian elimination on a numpy copy
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i, c]), None)
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] ^= M[r]
        r += 1
    assert A.rank() == r
    assert A.transpose().rank() == r


# --- RNG -----------------------------------------------------------------------------------

def test_rng_is_deterministic_and_forks_independently():
    a, b = DeterministicRng(7), DeterministicRng(7)
    assert a.bytes(100) == b.bytes(100)
    c = DeterministicRng(7)
    f1 = c.fork("x").bytes(16)
    assert c.bytes(100) == DeterministicRng(7).bytes(100)
    assert f1 != DeterministicRng(7).fork("y").bytes(16)


def test_rng_golden_stream():
    h = hashlib.shake_256(bytes([0x04]) + (32).to_bytes(4, "big") + (0).to_bytes(32, "big")
                          + (8).to_bytes(4, "big") + (0).to_bytes(8, "big"))
    assert DeterministicRng(0).bytes(64) == h.digest(64)


@given(st.integers(1, 50))
def test_permutation_is_permutation(n):
    assert sorted(DeterministicRng(n).permutation(n)) == list(range(n))
