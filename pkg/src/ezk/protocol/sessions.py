"""Prover and verifier state machines for both protocols.

A session consumes one incoming :class:`ProtocolMessage` at a time through
``handle`` and returns the messages it sends in reply.  ``start`` yields the
opening messages of the party that speaks first (always the prover).
"""

from __future__ import annotations

import enum

from .. import commitments as cm
from ..commitments import Commitment, PublicParam, SchemeId
from ..errors import DecodeError, InvalidArgument, SessionError
from ..primitives.bits import BitVector
from ..primitives.prg import XOF_MODE
from ..sigma import (CommitContext, CycleWitness, GraphInstance, SigmaFirstMsg, SigmaResponse,
                     mh_commit, mh_resp, mh_samp, mh_verify, sigma_p1, sigma_p3, sigma_verify)
from ..wipok import (OrStatement, WipokConfig, WipokProver, WipokVerifier, cycle_witness,
                     openings_witness)
from .config import ARGUMENT, PROOF, ProtocolConfig, lint_config
from .messages import (MsgType, ProtocolMessage, decode_opening, decode_pair, encode_opening,
                       encode_pair)


class Verdict(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    ABORT = "abort"     # the prover refused because the challenge opening was invalid

    @property
    def code(self) -> int:
        return {Verdict.ACCEPT: 0, Verdict.REJECT: 1, Verdict.ABORT: 2}[self]

    @classmethod
    def from_code(cls, c: int) -> "Verdict":
        for v in cls:
            if v.code == c:
                return v
        raise DecodeError(f"unknown verdict code {c}")


def flatten_commitments(a: SigmaFirstMsg) -> tuple[Commitment, ...]:
    return tuple(c for rep in a.reps for c in rep)


def wipok_config(cfg: ProtocolConfig) -> WipokConfig:
    # the WIPoK's own commitments never enter a circuit, so they use the XOF PRG
    return WipokConfig(k_reps=cfg.wipok_reps, lam=cfg.wipok_lam or cfg.lam, prg_mode=XOF_MODE)


def _expect_pp(data: bytes, scheme: SchemeId) -> PublicParam:
    pp = PublicParam.decode(data)
    if pp.scheme is not scheme:
        raise DecodeError(f"expected {scheme.value} parameters")
    return pp


def challenge_pp_ok(cfg: ProtocolConfig, pp: PublicParam) -> bool:
    """Parameter checks the verifier applies to the prover's challenge-commitment key."""
    p = pp.params
    if cfg.mode == PROOF:
        return pp.scheme is SchemeId.HM and p.msg_len == cfg.lam_reps and p.key and p.hash_len >= 1
    return pp.scheme is SchemeId.NAOR and p.lam == cfg.lam


class _Session:
    protocol_id = 0

    def __init__(self, x: GraphInstance, cfg: ProtocolConfig, rng):
        lint_config(cfg)
        self.x = x
        self.cfg = cfg
        self.rng = rng
        self.finished = False
        self.verdict: Verdict | None = None

    def msg(self, t: MsgType, payload: bytes) -> ProtocolMessage:
        return ProtocolMessage(self.cfg.protocol_id, t, payload)

    def start(self) -> list[ProtocolMessage]:
        return []

    def handle(self, m: ProtocolMessage) -> list[ProtocolMessage]:
        if self.finished:
            raise SessionError("session already finished")
        if m.protocol_id != self.cfg.protocol_id:
            raise SessionError("protocol id mismatch")
        fn = getattr(self, f"_on_{m.msg_type.name.lower()}", None)
        try:
            if fn is None:
                raise SessionError(f"unexpected message {m.msg_type.name}")
            return fn(m.payload)
        except (SessionError, DecodeError):
            # any protocol violation ends the session
            self.finished = True
            if self.verdict is None:
                self.verdict = Verdict.REJECT
            raise

    def _finish(self, v: Verdict) -> list[ProtocolMessage]:
        self.finished = True
        self.verdict = v
        return []


# --- prover ---------------------------------------------------------------------------------

CYCLE = "cycle"
OPENINGS = "openings"


class ProverSession(_Session):
    """Honest prover for either mode (chosen by ``cfg.mode``).

    In argument mode ``witness_choice`` selects which WIPoK branch the prover
    uses: the Hamiltonian cycle or the openings of its own commitments.
    """

    def __init__(self, x: GraphInstance, w: CycleWitness, cfg: ProtocolConfig, rng,
                 witness_choice: str = CYCLE):
        super().__init__(x, cfg, rng)
        if not w.is_valid_for(x):
            raise InvalidArgument("witness is not a Hamiltonian cycle of the instance")
        if witness_choice not in (CYCLE, OPENINGS):
            raise InvalidArgument(f"unknown witness choice {witness_choice!r}")
        self.w = w
        self.witness_choice = witness_choice
        self.pp = None
        self.com = None
        self.pp_sigma = None
        self.ctx = None
        self.state = None
        self.wipok = None
        self.expected = MsgType.COM

    def start(self):
        if self.cfg.mode == PROOF:
            self.pp = cm.setup(SchemeId.HM, self.cfg.lam, self.rng, msg_len=self.cfg.lam_reps,
                               hash_len=self.cfg.hm_hash_len)
        else:
            self.pp = cm.setup(SchemeId.NAOR, self.cfg.lam, self.rng)
        return [self.msg(MsgType.PP, self.pp.encode())]

    def _step(self, t: MsgType):
        if t is not self.expected:
            raise SessionError(f"expected {self.expected.name}, got {t.name}")

    def _on_com(self, payload: bytes):
        self._step(MsgType.COM)
        if self.cfg.split_frames:
            self.com = Commitment.decode(payload)
            self.expected = MsgType.PP_SIGMA
            return []
        com, pps = decode_pair(payload)
        self.com = Commitment.decode(com)
        return self._got_sigma_pp(pps)

    def _on_pp_sigma(self, payload: bytes):
        self._step(MsgType.PP_SIGMA)
        return self._got_sigma_pp(payload)

    def _got_sigma_pp(self, data: bytes):
        self.pp_sigma = _expect_pp(data, SchemeId.NAOR)
        if self.cfg.mode == ARGUMENT and self.pp_sigma.params.prg.mode != self.cfg.sigma_prg:
            raise SessionError("Sigma parameters do not match the configured PRG mode")
        self.ctx = CommitContext(self.pp_sigma)
        if self.cfg.mode == PROOF:
            a, self.state = sigma_p1(self.x, self.cfg.lam_reps, self.ctx, self.rng)
            self.expected = MsgType.OPEN
        else:
            msgs = mh_samp(self.x, self.cfg.lam_reps, self.rng)
            a, self.state = mh_commit(self.x, msgs, self.ctx, self.rng)
            self.expected = MsgType.W1
        return [self.msg(MsgType.A, a.encode())]

    def _on_w1(self, payload: bytes):
        self._step(MsgType.W1)
        st = OrStatement(self.pp_sigma, self.x, flatten_commitments(self.state.first))
        if self.witness_choice == CYCLE:
            wit = cycle_witness(self.w)
        else:
            bits = [b for m in self.state.messages for b in m]
            wit = openings_witness(st, bits, [o for ops in self.state.openings for o in ops])
        self.wipok = WipokProver(st, wit, wipok_config(self.cfg), self.rng)
        self.expected = MsgType.W3
        return [self.msg(MsgType.W2, self.wipok.receive_params(payload))]

    def _on_w3(self, payload: bytes):
        self._step(MsgType.W3)
        self.expected = MsgType.OPEN
        return [self.msg(MsgType.W4, self.wipok.receive_challenge(payload))]

    def _on_open(self, payload: bytes):
        self._step(MsgType.OPEN)
        try:
            e, r = decode_opening(payload)
        except DecodeError:
            e, r = None, None
        if e is None or len(e) != self.cfg.lam_reps or not cm.verify_open(self.pp, self.com, e, r):
            self.finished = True
            self.verdict = Verdict.ABORT
            return [self.msg(MsgType.ABORT, b"")]
        z = sigma_p3(self.state, self.w, e) if self.cfg.mode == PROOF else mh_resp(self.state, self.w, e)
        self.finished = True
        return [self.msg(MsgType.Z, z.encode())]


# --- verifier ---------------------------------------------------------------------------------

class VerifierSession(_Session):
    """Honest verifier for either mode."""

    def __init__(self, x: GraphInstance, cfg: ProtocolConfig, rng):
        super().__init__(x, cfg, rng)
        self.pp = None
        self.pp_sigma = None
        self.ctx = None
        self.e: BitVector | None = None
        self.r = None
        self.a: SigmaFirstMsg | None = None
        self.wipok = None
        self.expected = MsgType.PP

    def _step(self, t: MsgType):
        if t is not self.expected:
            raise SessionError(f"expected {self.expected.name}, got {t.name}")

    def sigma_params(self) -> PublicParam:
        return cm.setup(SchemeId.NAOR, self.cfg.lam, self.rng, prg_mode=self.cfg.sigma_prg)

    def challenge(self) -> BitVector:
        return self.rng.bitvector(self.cfg.lam_reps)

    def opening_payload(self) -> bytes:
        return encode_opening(self.e, self.r)

    def _on_pp(self, payload: bytes):
        self._step(MsgType.PP)
        try:
            self.pp = PublicParam.decode(payload)
            ok = challenge_pp_ok(self.cfg, self.pp)
        except (DecodeError, InvalidArgument, AttributeError):
            ok = False
        if not ok:
            return self._finish(Verdict.REJECT)
        self.e = self.challenge()
        com, self.r = cm.commit(self.pp, self.e, self.rng)
        self.pp_sigma = self.sigma_params()
        self.ctx = CommitContext(self.pp_sigma)
        self.expected = MsgType.A
        if self.cfg.split_frames:
            return [self.msg(MsgType.COM, com.encode()),
                    self.msg(MsgType.PP_SIGMA, self.pp_sigma.encode())]
        return [self.msg(MsgType.COM, encode_pair(com.encode(), self.pp_sigma.encode()))]

    def _on_a(self, payload: bytes):
        self._step(MsgType.A)
        try:
            self.a = SigmaFirstMsg.decode(payload)
        except DecodeError:
            return self._finish(Verdict.REJECT)
        if self.cfg.mode == PROOF:
            self.expected = MsgType.Z
            return [self.msg(MsgType.OPEN, self.opening_payload())]
        try:
            st = OrStatement(self.pp_sigma, self.x, flatten_commitments(self.a))
            self.wipok = WipokVerifier(st, wipok_config(self.cfg), self.rng)
        except (InvalidArgument, DecodeError):
            return self._finish(Verdict.REJECT)
        self.expected = MsgType.W2
        return [self.msg(MsgType.W1, self.wipok.params_message())]

    def _on_w2(self, payload: bytes):
        self._step(MsgType.W2)
        try:
            ch = self.wipok.receive_first(payload)
        except (DecodeError, InvalidArgument):
            return self._finish(Verdict.REJECT)
        self.expected = MsgType.W4
        return [self.msg(MsgType.W3, ch)]

    def _on_w4(self, payload: bytes):
        self._step(MsgType.W4)
        if not self.wipok.receive_response(payload):
            # the challenge is never opened to a prover that failed the WIPoK
            return self._finish(Verdict.REJECT)
        self.expected = MsgType.Z
        return [self.msg(MsgType.OPEN, self.opening_payload())]

    def _on_z(self, payload: bytes):
        self._step(MsgType.Z)
        try:
            z = SigmaResponse.decode(payload)
        except DecodeError:
            return self._finish(Verdict.REJECT)
        verify = sigma_verify if self.cfg.mode == PROOF else mh_verify
        ok = verify(self.x, self.ctx, self.a, self.e, z)
        return self._finish(Verdict.ACCEPT if ok else Verdict.REJECT)

    def _on_abort(self, payload: bytes):
        if self.expected is not MsgType.Z:
            raise SessionError("unexpected ABORT")
        return self._finish(Verdict.ABORT)
