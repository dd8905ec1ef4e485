"""Verifiers that deviate from the honest behaviour in controlled ways."""

from __future__ import annotations

from ..commitments import Opening, PublicParam, SchemeId
from ..commitments import naor
from ..errors import InvalidArgument
from ..primitives.bits import BitVector
from ..sigma import SigmaFirstMsg
from .messages import encode_opening
from .sessions import VerifierSession

HONEST = "honest"
BAD_OPENING = "bad-opening"
ABORT_IF_FIRST_BIT = "abort-if-first-bit"
SCRIPTS = (HONEST, BAD_OPENING, ABORT_IF_FIRST_BIT)


def first_commitment_bit(a: SigmaFirstMsg) -> int:
    """Bit 0 of the first Naor block of the first committed entry of ``a``."""
    com = a.reps[0][0]
    if com.scheme is not SchemeId.NAOR:
        raise InvalidArgument("first-bit script expects Naor commitments")
    body = com.bytes
    # u32 block count, u32 bit length, then the packed block
    return body[8] & 1


def first_bit_bias(pp_sigma: PublicParam, committed_bit: int = 0) -> float:
    """Exact probability that :func:`first_commitment_bit` is 1.

    Enumerates every seed; the first entry of a Hamiltonicity commitment is a
    diagonal adjacency bit and therefore always 0.
    """
    p = pp_sigma.params
    if pp_sigma.scheme is not SchemeId.NAOR:
        raise InvalidArgument("bias is defined for Naor parameters")
    if p.lam > 20:
        raise InvalidArgument("seed enumeration limited to lambda <= 20")
    ones = 0
    for s in range(1 << p.lam):
        ones += naor.commit_block(p, committed_bit, BitVector(s, p.lam))[0]
    return ones / (1 << p.lam)


class ScriptedVerifier(VerifierSession):
    """Verifier following ``script``.

    ``bad-opening`` always sends an opening for a different challenge;
    ``abort-if-first-bit`` does so exactly when the first committed bit of
    the prover's first message is 1.  ``sigma_pp`` and ``challenge`` pin the
    verifier's otherwise random choices.
    """

    def __init__(self, x, cfg, rng, script: str = HONEST, *, sigma_pp: PublicParam | None = None,
                 challenge: BitVector | None = None):
        if script not in SCRIPTS:
            raise InvalidArgument(f"unknown script {script!r}")
        super().__init__(x, cfg, rng)
        self.script = script
        self.fixed_sigma_pp = sigma_pp
        self.fixed_challenge = challenge

    def sigma_params(self):
        return self.fixed_sigma_pp or super().sigma_params()

    def challenge(self):
        if self.fixed_challenge is not None:
            return self.fixed_challenge
        return super().challenge()

    def _cheat(self) -> bool:
        if self.script == BAD_OPENING:
            return True
        if self.script == ABORT_IF_FIRST_BIT:
            return first_commitment_bit(self.a) == 1
        return False

    def opening_payload(self) -> bytes:
        if not self._cheat():
            return super().opening_payload()
        # a well-formed opening that does not match the commitment
        return encode_opening(self.e.flip(0), Opening(self.r.bytes))
