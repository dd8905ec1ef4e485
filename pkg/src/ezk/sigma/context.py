"""Bitwise commitment context shared by the Sigma-protocol flavors."""

from __future__ import annotations

from dataclasses import dataclass

import struct

from .. import commitments as cm
from ..commitments import Commitment, Opening, PublicParam, SchemeId
from ..errors import InvalidArgument
from ..primitives.bits import BitVector
from ..primitives.prg import XOF_MODE
from ..primitives.xof import TAG_PRG, xof

_BIT = (BitVector(0, 1), BitVector(1, 1))


@dataclass(frozen=True)
class CommitContext:
    """Commits single bits under ``pp``.

    ``pp`` is either fixed in advance or, in the receiver-parameter mode,
    the Naor parameters chosen by the verifier.
    """

    pp: PublicParam

    def __post_init__(self) -> None:
        p = self.pp.params
        if self.pp.scheme is SchemeId.TOY and p.m_bits != 1:
            raise InvalidArgument("Sigma commitments need a one-bit ToyTable")
        if self.pp.scheme is SchemeId.HM and p.msg_len != 1:
            raise InvalidArgument("Sigma commitments need one-bit Halevi-Micali parameters")

    def _naor_fast(self) -> bool:
        return self.pp.scheme is SchemeId.NAOR and self.pp.params.prg.mode == XOF_MODE

    def _naor_block(self, b: int, seed: bytes) -> bytes:
        # same bytes as commitments.naor.commit_with for a one-bit message
        p = self.pp.params
        nbytes = (p.block_len + 7) // 8
        g = int.from_bytes(xof(TAG_PRG, seed, out_len=nbytes), "little") & ((1 << p.block_len) - 1)
        if b:
            g ^= p.R.value
        return struct.pack(">II", 1, p.block_len) + g.to_bytes(nbytes, "little")

    def commit_bit(self, b: int, rng) -> tuple[Commitment, Opening]:
        if self._naor_fast():
            seed = rng.bitvector(self.pp.params.lam).to_bytes()
            return Commitment(SchemeId.NAOR, self._naor_block(b, seed)), Opening(seed)
        return cm.commit(self.pp, _BIT[b], rng)

    def commit_bits(self, m: BitVector, rng) -> tuple[list[Commitment], list[Opening]]:
        coms, opens = [], []
        for b in m:
            c, o = self.commit_bit(b, rng)
            coms.append(c)
            opens.append(o)
        return coms, opens

    def verify_bit(self, com: Commitment, b: int, opening: Opening) -> bool:
        if b not in (0, 1):
            return False
        if self._naor_fast() and isinstance(com, Commitment) and isinstance(opening, Opening):
            lam = self.pp.params.lam
            seed = opening.bytes
            if com.scheme is not SchemeId.NAOR or len(seed) != (lam + 7) // 8:
                return False
            if lam % 8 and seed[-1] >> (lam % 8):
                return False
            return self._naor_block(b, seed) == com.bytes
        return cm.verify_open(self.pp, com, _BIT[b], opening)
