"""OR composition of two branch protocols sharing a challenge space."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from ..encoding import Reader, Writer
from ..errors import DecodeError, InvalidArgument
from ..primitives.bits import BitVector
from .branch import BranchProtocol

BRANCH_A = "A"
BRANCH_B = "B"


@dataclass(frozen=True)
class OrWitness:
    branch: str
    value: Any

    def __post_init__(self) -> None:
        if self.branch not in (BRANCH_A, BRANCH_B):
            raise InvalidArgument("branch must be 'A' or 'B'")


@dataclass(frozen=True)
class OrResponse:
    e_a: BitVector
    z_a: Any
    z_b: Any


class OrProtocol(BranchProtocol):
    """Statement ``(s_a, s_b)``; the verifier's challenge splits as ``e = e_a xor e_b``.

    The prover picks the sub-challenge of the branch it cannot answer in
    advance, simulates that branch, and answers the other honestly.
    """

    def __init__(self, branch_a: BranchProtocol, branch_b: BranchProtocol):
        if branch_a.k_reps != branch_b.k_reps:
            raise InvalidArgument("branches must share the challenge space")
        self.a = branch_a
        self.b = branch_b
        self.k_reps = branch_a.k_reps

    def first(self, statement, witness: OrWitness, rng):
        s_a, s_b = statement
        if witness.branch == BRANCH_A:
            e_sim = rng.bitvector(self.k_reps)
            a_b, z_b = self.b.simulate(s_b, e_sim, rng)
            a_a, st = self.a.first(s_a, witness.value, rng)
        else:
            e_sim = rng.bitvector(self.k_reps)
            a_a, z_a = self.a.simulate(s_a, e_sim, rng)
            a_b, st = self.b.first(s_b, witness.value, rng)
        sim = z_b if witness.branch == BRANCH_A else z_a
        return (a_a, a_b), (witness, st, e_sim, sim)

    def respond(self, st, witness, e: BitVector) -> OrResponse:
        w, real_st, e_sim, sim = st
        if len(e) != self.k_reps:
            raise InvalidArgument("challenge length mismatch")
        e_real = e ^ e_sim
        if w.branch == BRANCH_A:
            return OrResponse(e_real, self.a.respond(real_st, w.value, e_real), sim)
        return OrResponse(e_sim, sim, self.b.respond(real_st, w.value, e_real))

    def verify(self, statement, a, e: BitVector, z: OrResponse) -> bool:
        try:
            s_a, s_b = statement
            a_a, a_b = a
            if len(z.e_a) != self.k_reps or len(e) != self.k_reps:
                return False
            e_b = e ^ z.e_a
            return self.a.verify(s_a, a_a, z.e_a, z.z_a) and self.b.verify(s_b, a_b, e_b, z.z_b)
        except (InvalidArgument, DecodeError, TypeError, ValueError, AttributeError):
            return False

    def simulate(self, statement, e: BitVector, rng):
        s_a, s_b = statement
        e_a = rng.bitvector(self.k_reps)
        a_a, z_a = self.a.simulate(s_a, e_a, rng)
        a_b, z_b = self.b.simulate(s_b, e ^ e_a, rng)
        return (a_a, a_b), OrResponse(e_a, z_a, z_b)

    def extract(self, statement, a, e1, z1: OrResponse, e2, z2: OrResponse) -> OrWitness:
        s_a, s_b = statement
        a_a, a_b = a
        if e1 == e2:
            raise InvalidArgument("challenges must differ")
        if z1.e_a != z2.e_a:
            return OrWitness(BRANCH_A, self.a.extract(s_a, a_a, z1.e_a, z1.z_a, z2.e_a, z2.z_a))
        eb1, eb2 = e1 ^ z1.e_a, e2 ^ z2.e_a
        return OrWitness(BRANCH_B, self.b.extract(s_b, a_b, eb1, z1.z_b, eb2, z2.z_b))

    # encodings: branch-tagged sections --------------------------------------------------
    def encode_first(self, a) -> bytes:
        a_a, a_b = a
        return (Writer().u8(ord(BRANCH_A)).blob(self.a.encode_first(a_a))
                .u8(ord(BRANCH_B)).blob(self.b.encode_first(a_b)).getvalue())

    def decode_first(self, data: bytes):
        r = Reader(data)
        if r.u8() != ord(BRANCH_A):
            raise DecodeError("expected branch A section")
        a_a = self.a.decode_first(r.blob())
        if r.u8() != ord(BRANCH_B):
            raise DecodeError("expected branch B section")
        a_b = self.b.decode_first(r.blob())
        r.done()
        return a_a, a_b

    def encode_response(self, z: OrResponse) -> bytes:
        return (Writer().bits(z.e_a).u8(ord(BRANCH_A)).blob(self.a.encode_response(z.z_a))
                .u8(ord(BRANCH_B)).blob(self.b.encode_response(z.z_b)).getvalue())

    def decode_response(self, data: bytes) -> OrResponse:
        r = Reader(data)
        e_a = r.bits()
        if r.u8() != ord(BRANCH_A):
            raise DecodeError("expected branch A section")
        z_a = self.a.decode_response(r.blob())
        if r.u8() != ord(BRANCH_B):
            raise DecodeError("expected branch B section")
        z_b = self.b.decode_response(r.blob())
        r.done()
        return OrResponse(e_a, z_a, z_b)


def or_compose(branch_a: BranchProtocol, branch_b: BranchProtocol) -> OrProtocol:
    return OrProtocol(branch_a, branch_b)
