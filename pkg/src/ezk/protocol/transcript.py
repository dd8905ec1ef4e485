"""Transcript files and offline replay.

Layout: ``b"EZKT" || u8 version || blob(context json) || u32 count || frames ||
u8 verdict || 32-byte SHA-256 of the context``.  The context records the
configuration and the instance so a transcript can be checked on its own.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path

from .. import commitments as cm
from ..commitments import Commitment, PublicParam, SchemeId
from ..encoding import Reader, Writer
from ..errors import DecodeError, InvalidArgument
from ..sigma import (CommitContext, GraphInstance, SigmaFirstMsg, SigmaResponse, instance_from_json,
                     mh_verify, sigma_verify)
from ..wipok import OrStatement
from ..wipok.session import make_protocol
from .config import PROOF, ProtocolConfig, lint_config
from .messages import MsgType, ProtocolMessage, decode_opening, decode_pair
from .sessions import Verdict, challenge_pp_ok, flatten_commitments, wipok_config

MAGIC = b"EZKT"
VERSION = 1


@dataclass
class Transcript:
    cfg: ProtocolConfig
    x: GraphInstance
    messages: list[ProtocolMessage]
    verdict: Verdict

    def context(self) -> bytes:
        obj = {"config": self.cfg.to_json(), "instance": self.x.to_json()}
        return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()

    def encode(self) -> bytes:
        ctx = self.context()
        w = Writer().u8(VERSION).blob(ctx).u32(len(self.messages))
        body = MAGIC + w.getvalue() + b"".join(m.frame() for m in self.messages)
        return body + bytes([self.verdict.code]) + hashlib.sha256(ctx).digest()

    def digest(self) -> str:
        return hashlib.sha256(self.encode()).hexdigest()

    @classmethod
    def decode(cls, data: bytes) -> "Transcript":
        if data[:4] != MAGIC:
            raise DecodeError("not a transcript file")
        rd = Reader(data[4:])
        if rd.u8() != VERSION:
            raise DecodeError("unsupported transcript version")
        ctx = rd.blob()
        count = rd.u32()
        pos = len(data) - rd.remaining
        msgs = []
        for _ in range(count):
            if pos + 4 > len(data):
                raise DecodeError("truncated frame")
            (n,) = struct.unpack(">I", data[pos:pos + 4])
            msgs.append(ProtocolMessage.unframe(data[pos:pos + 4 + n]))
            pos += 4 + n
        trailer = data[pos:]
        if len(trailer) != 33:
            raise DecodeError("bad trailer")
        if hashlib.sha256(ctx).digest() != trailer[1:]:
            raise DecodeError("context hash mismatch")
        try:
            obj = json.loads(ctx)
            cfg = ProtocolConfig.from_json(obj["config"])
            x, _ = instance_from_json(obj["instance"])
        except (ValueError, KeyError, TypeError) as exc:
            raise DecodeError(f"bad transcript context: {exc}") from exc
        return cls(cfg, x, msgs, Verdict.from_code(trailer[0]))

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.encode())

    @classmethod
    def load(cls, path: str | Path) -> "Transcript":
        return cls.decode(Path(path).read_bytes())


def _take(msgs, i, t: MsgType) -> bytes:
    if i >= len(msgs) or msgs[i].msg_type is not t:
        raise DecodeError(f"expected {t.name} at position {i}")
    return msgs[i].payload


def replay(tr: Transcript) -> Verdict:
    """Re-run every verifier check over the logged messages.

    The verifier's own messages are checked for internal consistency: its
    challenge opening must be valid for the committed challenge.
    """
    cfg = tr.cfg
    try:
        lint_config(cfg)
    except InvalidArgument:
        return Verdict.REJECT
    msgs = tr.messages
    if any(m.protocol_id != cfg.protocol_id for m in msgs):
        return Verdict.REJECT
    try:
        return _replay(cfg, tr.x, msgs)
    except (DecodeError, InvalidArgument, AttributeError):
        return Verdict.REJECT


def _replay(cfg: ProtocolConfig, x: GraphInstance, msgs) -> Verdict:
    pp = PublicParam.decode(_take(msgs, 0, MsgType.PP))
    if not challenge_pp_ok(cfg, pp):
        return Verdict.REJECT
    if cfg.split_frames:
        com = Commitment.decode(_take(msgs, 1, MsgType.COM))
        pps = PublicParam.decode(_take(msgs, 2, MsgType.PP_SIGMA))
        i = 3
    else:
        c, p = decode_pair(_take(msgs, 1, MsgType.COM))
        com, pps = Commitment.decode(c), PublicParam.decode(p)
        i = 2
    if pps.scheme is not SchemeId.NAOR:
        return Verdict.REJECT
    ctx = CommitContext(pps)
    a = SigmaFirstMsg.decode(_take(msgs, i, MsgType.A))
    i += 1
    if cfg.mode != PROOF:
        st = OrStatement(pps, x, flatten_commitments(a))
        pp_w = PublicParam.decode(_take(msgs, i, MsgType.W1))
        wcfg = wipok_config(cfg)
        if pp_w.scheme is not SchemeId.NAOR or pp_w.params.lam != wcfg.lam:
            return Verdict.REJECT
        proto = make_protocol(pp_w, wcfg.k_reps)
        wa = proto.decode_first(_take(msgs, i + 1, MsgType.W2))
        rd = Reader(_take(msgs, i + 2, MsgType.W3))
        we = rd.bits()
        rd.done()
        if len(we) != wcfg.k_reps:
            return Verdict.REJECT
        wz = proto.decode_response(_take(msgs, i + 3, MsgType.W4))
        if not proto.verify(st.branch_statements(), wa, we, wz):
            return Verdict.REJECT
        i += 4
    e, r = decode_opening(_take(msgs, i, MsgType.OPEN))
    i += 1
    if len(e) != cfg.lam_reps or not cm.verify_open(pp, com, e, r):
        aborted = i + 1 == len(msgs) and msgs[i].msg_type is MsgType.ABORT
        return Verdict.ABORT if aborted else Verdict.REJECT
    if i < len(msgs) and msgs[i].msg_type is MsgType.ABORT:
        # a valid opening leaves the prover no reason to abort
        return Verdict.REJECT
    z = SigmaResponse.decode(_take(msgs, i, MsgType.Z))
    if i + 1 != len(msgs):
        return Verdict.REJECT
    verify = sigma_verify if cfg.mode == PROOF else mh_verify
    return Verdict.ACCEPT if verify(x, ctx, a, e, z) else Verdict.REJECT


def verify_transcript(tr: Transcript) -> bool:
    """Accept iff the replay accepts and the recorded verdict agrees."""
    return tr.verdict is Verdict.ACCEPT and replay(tr) is Verdict.ACCEPT
