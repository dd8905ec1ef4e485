"""Toeplitz universal hashing ``f(r) = T r xor offset``."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from ..errors import InvalidArgument, RankDeficient
from .bits import BitVector, GF2Matrix, gf2_solve


@dataclass(frozen=True)
class ToeplitzHash:
    in_len: int
    out_len: int
    diag: BitVector
    offset: BitVector

    def __post_init__(self) -> None:
        if len(self.diag) != self.in_len + self.out_len - 1:
            raise InvalidArgument("diag must have in_len + out_len - 1 bits")
        if len(self.offset) != self.out_len:
            raise InvalidArgument("offset must have out_len bits")

    @classmethod
    def random(cls, in_len: int, out_len: int, rng) -> "ToeplitzHash":
        return cls(in_len, out_len, rng.bitvector(in_len + out_len - 1), rng.bitvector(out_len))

    @cached_property
    def matrix(self) -> GF2Matrix:
        # T[i][j] = diag[i - j + in_len - 1]
        L = self.in_len
        d = self.diag.value
        rows = []
        for i in range(self.out_len):
            row = 0
            for j in range(L):
                if (d >> (i - j + L - 1)) & 1:
                    row |= 1 << j
            rows.append(row)
        return GF2Matrix(self.out_len, L, rows)

    def is_full_rank(self) -> bool:
        return self.matrix.rank() == self.out_len

    @cached_property
    def _solver(self) -> tuple[list[int], list[int]]:
        # solutions are linear in the right-hand side: keep one preimage per
        # unit vector plus a kernel basis
        if not self.is_full_rank():
            raise RankDeficient("Toeplitz matrix is not full row rank")
        right_inv = []
        kernel: list[int] = []
        for i in range(self.out_len):
            particular, kernel_bv = gf2_solve(self.matrix, BitVector(1 << i, self.out_len))
            right_inv.append(particular.value)
            kernel = [k.value for k in kernel_bv]
        if not self.out_len:
            kernel = [1 << j for j in range(self.in_len)]
        return right_inv, kernel


def universal_hash_eval(f: ToeplitzHash, r: BitVector) -> BitVector:
    if len(r) != f.in_len:
        raise InvalidArgument("input length mismatch")
    return f.matrix.mul_vec(r) ^ f.offset


def universal_hash_sample_preimage(f: ToeplitzHash, m: BitVector, rng) -> BitVector:
    """Uniform element of ``{r : f(r) = m}``."""
    if len(m) != f.out_len:
        raise InvalidArgument("message length mismatch")
    right_inv, kernel = f._solver
    target = (m ^ f.offset).value
    v = 0
    for i, x in enumerate(right_inv):
        if (target >> i) & 1:
            v ^= x
    coins = rng.randbits(len(kernel)) if kernel else 0
    for i, k in enumerate(kernel):
        if (coins >> i) & 1:
            v ^= k
    return BitVector(v, f.in_len)
