"""Exhaustive binding and hiding analysis at toy scale."""

from __future__ import annotations

from collections import Counter
from itertools import product

import numpy as np

from ..errors import InvalidArgument, Unsupported
from ..primitives.bits import BitVector
from ..primitives.prg import prg_expand
from . import _params
from .base import PublicParam, SchemeId
from .halevi_micali import HMParams, keyed_hash
from .naor import NaorParams, commit_block
from .toytable import ToyTable

ENUM_LIMIT = 1 << 20


def _naor_images(p: NaorParams) -> list[int]:
    return [prg_expand(p.prg, BitVector(s, p.lam)).value for s in range(1 << p.lam)]


def is_binding_pp(pp: PublicParam) -> bool:
    """True iff no commitment value opens to two distinct messages."""
    p = _params(pp)
    if pp.scheme is SchemeId.TOY:
        return p.is_binding()
    if pp.scheme is SchemeId.NAOR:
        if 2 << p.lam > ENUM_LIMIT:
            raise Unsupported("seed space too large to enumerate")
        # strings are committed bitwise, so binding reduces to one bit:
        # G(s) = G(s') xor R for some seeds
        images = set(_naor_images(p))
        R = p.R.value
        return not any((g ^ R) in images for g in images)
    raise Unsupported("Halevi-Micali commitments are not statistically binding")


def naor_colliding_R(p: NaorParams, s0: int, s1: int) -> BitVector:
    """The pad ``R = G(s0) xor G(s1)`` that makes the two seeds collide."""
    g0 = prg_expand(p.prg, BitVector(s0, p.lam))
    g1 = prg_expand(p.prg, BitVector(s1, p.lam))
    return g0 ^ g1


def _tv(a: Counter, b: Counter, na: int, nb: int) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(a.get(k, 0) / na - b.get(k, 0) / nb) for k in keys)


def commit_distribution(pp: PublicParam, m: BitVector) -> Counter:
    """Counts of each commitment value over the full randomness space (Toy, Naor)."""
    p = _params(pp)
    if pp.scheme is SchemeId.TOY:
        if len(m) != p.m_bits:
            raise InvalidArgument("message length mismatch")
        return Counter(p.lookup(m.value, r) for r in range(p.n_rand))
    if pp.scheme is SchemeId.NAOR:
        k = len(m)
        if (1 << (p.lam * k)) > ENUM_LIMIT:
            raise Unsupported("randomness space too large to enumerate")
        blocks = [[commit_block(p, m[i], BitVector(s, p.lam)).value for s in range(1 << p.lam)]
                  for i in range(k)]
        return Counter(product(*blocks))
    raise Unsupported("use hm_hiding_distance for Halevi-Micali")


def statistical_hiding_distance(pp: PublicParam, m0: BitVector, m1: BitVector) -> float:
    """Exact total-variation distance between commitments to ``m0`` and ``m1``."""
    if len(m0) != len(m1):
        raise InvalidArgument("messages must have equal length")
    if pp.scheme is SchemeId.HM:
        return hm_hiding_distance(_params(pp), m0, m1)
    if pp.scheme is SchemeId.NAOR:
        # positions where the messages agree contribute identical factors
        p = _params(pp)
        diff = [i for i in range(len(m0)) if m0[i] != m1[i]]
        if not diff:
            return 0.0
        sub0 = BitVector.from_bits([m0[i] for i in diff])
        sub1 = BitVector.from_bits([m1[i] for i in diff])
        d0, d1 = commit_distribution(pp, sub0), commit_distribution(pp, sub1)
        n = 1 << (p.lam * len(diff))
        return _tv(d0, d1, n, n)
    d0, d1 = commit_distribution(pp, m0), commit_distribution(pp, m1)
    n = _params(pp).n_rand
    return _tv(d0, d1, n, n)


def best_guess_probability(table: ToyTable) -> float:
    """Optimal probability of guessing a uniform committed message from its commitment."""
    joint: dict[int, Counter] = {}
    for m in range(table.n_messages):
        for r in range(table.n_rand):
            joint.setdefault(table.lookup(m, r), Counter())[m] += 1
    total = table.n_messages * table.n_rand
    return sum(max(c.values()) for c in joint.values()) / total


# --- Halevi-Micali -------------------------------------------------------------

def _walsh_hadamard(a: np.ndarray) -> np.ndarray:
    """Unnormalized transform along the last axis (length a power of two)."""
    a = a.copy()
    n = a.shape[-1]
    h = 1
    while h < n:
        a = a.reshape(a.shape[:-1] + (n // (2 * h), 2, h))
        x, y = a[..., 0, :].copy(), a[..., 1, :].copy()
        a[..., 0, :] = x + y
        a[..., 1, :] = x - y
        a = a.reshape(a.shape[:-3] + (n,))
        h *= 2
    return a


def _hash_table(p: HMParams) -> np.ndarray:
    L = p.in_len
    return np.fromiter((keyed_hash(p, BitVector(r, L)).value for r in range(1 << L)),
                       dtype=np.int64, count=1 << L)


def hm_hiding_distance(p: HMParams, m0: BitVector, m1: BitVector, *, chunk: int = 1 << 15) -> float:
    """Exact distance between Halevi-Micali commitments to two messages.

    The commitment is ``(H(r), f)`` with ``f`` uniform among full-rank
    Toeplitz maps and ``r`` uniform in ``f^{-1}(m)``.  For each Toeplitz
    matrix the joint counts ``#{r : H(r)=y, T r = s}`` are recovered from
    Walsh-Hadamard coefficients of the indicator functions of ``H = y``,
    evaluated at the ``2^n`` row combinations of ``T``.
    """
    n, l, L = p.msg_len, p.hash_len, p.in_len
    if len(m0) != n or len(m1) != n:
        raise InvalidArgument("message length mismatch")
    if L > 22 or n > 3 or l > 6:
        raise Unsupported("parameters too large for exact enumeration")
    H = _hash_table(p)
    indicators = np.zeros((1 << l, 1 << L), dtype=np.int64)
    indicators[H, np.arange(1 << L)] = 1
    spectrum = _walsh_hadamard(indicators)  # [y, u]

    vs = np.arange(1 << n)
    # sign[v, s] = (-1)^{v.s}
    sign = np.array([[(-1) ** bin(v & s).count("1") for s in range(1 << n)] for v in vs],
                    dtype=np.int64)
    total = 0.0
    count_full_rank = 0
    n_diag = 1 << (L + n - 1)
    for start in range(0, n_diag, chunk):
        d = np.arange(start, min(start + chunk, n_diag), dtype=np.int64)
        rows = []
        for i in range(n):
            row = np.zeros_like(d)
            for j in range(L):
                row |= ((d >> (i - j + L - 1)) & 1) << j
            rows.append(row)
        combos = np.zeros((len(d), 1 << n), dtype=np.int64)
        for v in range(1, 1 << n):
            acc = np.zeros_like(d)
            for i in range(n):
                if (v >> i) & 1:
                    acc ^= rows[i]
            combos[:, v] = acc
        full = np.all(combos[:, 1:] != 0, axis=1)
        combos = combos[full]
        count_full_rank += int(full.sum())
        if not len(combos):
            continue
        coeff = spectrum[:, combos]  # [y, diag, v]
        counts = np.einsum("ydv,vs->yds", coeff, sign) >> n  # [y, diag, s]
        # average over offsets o: compare columns m0^o and m1^o
        for o in range(1 << n):
            a = counts[:, :, m0.value ^ o]
            b = counts[:, :, m1.value ^ o]
            total += float(np.abs(a - b).sum())
    coset = 1 << (L - n)
    # 0.5 * sum_y |.| / coset, averaged over full-rank diagonals and offsets
    return 0.5 * total / coset / (count_full_rank * (1 << n))
