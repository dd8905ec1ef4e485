"""Naor's bit commitment from a length-tripling generator.

A bit ``b`` with seed ``s`` commits to ``G(s)`` when ``b = 0`` and to
``G(s) xor R`` when ``b = 1``.  Strings are committed bit by bit with one
shared ``R`` and a fresh seed per bit.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..encoding import Reader, Writer
from ..errors import DecodeError, InvalidArgument
from ..primitives.bits import BitVector, GF2Matrix
from ..primitives.prg import LINEAR_TOY, XOF_MODE, PrgSpec, prg_expand


@dataclass(frozen=True)
class NaorParams:
    lam: int
    prg: PrgSpec
    R: BitVector

    @property
    def block_len(self) -> int:
        return 3 * self.lam

    def encode(self) -> bytes:
        w = Writer().u16(self.lam)
        if self.prg.mode == LINEAR_TOY:
            w.u8(0).blob(self.prg.matrix.data)
        else:
            w.u8(1)
        return w.bits(self.R).getvalue()

    @classmethod
    def decode(cls, data: bytes) -> "NaorParams":
        r = Reader(data)
        lam = r.u16()
        mode = r.u8()
        if lam < 1:
            raise DecodeError("bad lambda")
        if mode == 0:
            prg = PrgSpec.linear(GF2Matrix.from_bytes(3 * lam, lam, r.blob()))
        elif mode == 1:
            prg = PrgSpec(XOF_MODE, lam, 3 * lam)
        else:
            raise DecodeError("bad PRG mode")
        R = r.bits()
        r.done()
        if len(R) != 3 * lam:
            raise DecodeError("R must have 3*lambda bits")
        return cls(lam, prg, R)


def setup(lam: int, rng, prg_mode: str = XOF_MODE, prg: PrgSpec | None = None) -> NaorParams:
    if prg is None:
        if prg_mode == LINEAR_TOY:
            prg = PrgSpec.random_linear(lam, 3 * lam, rng)
        else:
            prg = PrgSpec(XOF_MODE, lam, 3 * lam)
    if prg.seed_len != lam or prg.out_len != 3 * lam:
        raise InvalidArgument("Naor needs a generator from lambda to 3*lambda bits")
    return NaorParams(lam, prg, rng.bitvector(3 * lam))


def commit_block(p: NaorParams, bit: int, seed: BitVector) -> BitVector:
    g = prg_expand(p.prg, seed)
    return g ^ p.R if bit else g


def commit_with(p: NaorParams, m: BitVector, seeds: BitVector) -> bytes:
    k = len(m)
    if len(seeds) != k * p.lam:
        raise InvalidArgument("need one seed per message bit")
    blocks = [commit_block(p, m[i], seeds[i * p.lam:(i + 1) * p.lam]) for i in range(k)]
    return Writer().u32(k).bits(BitVector.concat(blocks)).getvalue()


def commit(p: NaorParams, m: BitVector, rng) -> tuple[bytes, bytes]:
    seeds = rng.bitvector(len(m) * p.lam)
    return commit_with(p, m, seeds), seeds.to_bytes()


def decode_commitment(p: NaorParams, data: bytes) -> list[BitVector]:
    r = Reader(data)
    k = r.u32()
    body = r.bits()
    r.done()
    if len(body) != k * p.block_len:
        raise DecodeError("commitment length mismatch")
    return body.chunks(p.block_len) if k else []


def verify_open(p: NaorParams, com: bytes, m: BitVector, opening: bytes) -> bool:
    k = len(m)
    try:
        seeds = BitVector.from_bytes(opening, k * p.lam)
    except InvalidArgument:
        return False
    try:
        return commit_with(p, m, seeds) == com
    except InvalidArgument:
        return False
