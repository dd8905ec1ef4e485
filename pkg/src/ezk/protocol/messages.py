"""Wire messages and framing.

Frame layout: ``len (4 bytes, big-endian) || protocol_id (1) || msg_type (1) || payload``
where ``len`` counts the two header bytes plus the payload.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

from ..commitments import Opening
from ..encoding import Reader, Writer
from ..errors import DecodeError
from ..primitives.bits import BitVector

MAX_MESSAGE = 1 << 20


class MsgType(enum.IntEnum):
    PP = 1          # prover: challenge-commitment parameters
    COM = 2         # verifier: challenge commitment (plus Sigma parameters unless split)
    PP_SIGMA = 3    # verifier: Sigma parameters as a separate frame
    A = 4           # prover: Sigma first message
    W1 = 5          # verifier: WIPoK commitment parameters
    W2 = 6          # prover: WIPoK first message
    W3 = 7          # verifier: WIPoK challenge
    W4 = 8          # prover: WIPoK response
    OPEN = 9        # verifier: challenge and opening
    Z = 10          # prover: Sigma response
    ABORT = 11      # prover: opening check failed


@dataclass(frozen=True)
class ProtocolMessage:
    protocol_id: int
    msg_type: MsgType
    payload: bytes

    def frame(self) -> bytes:
        body = bytes([self.protocol_id, int(self.msg_type)]) + self.payload
        if len(body) > MAX_MESSAGE:
            raise DecodeError("message exceeds the size cap")
        return struct.pack(">I", len(body)) + body

    @classmethod
    def unframe(cls, data: bytes) -> "ProtocolMessage":
        if len(data) < 6:
            raise DecodeError("frame too short")
        (n,) = struct.unpack(">I", data[:4])
        if n != len(data) - 4 or n < 2:
            raise DecodeError("frame length mismatch")
        if n > MAX_MESSAGE:
            raise DecodeError("message exceeds the size cap")
        return cls.from_body(data[4:])

    @classmethod
    def from_body(cls, body: bytes) -> "ProtocolMessage":
        pid = body[0]
        if pid not in (1, 2):
            raise DecodeError(f"unknown protocol id {pid}")
        try:
            mtype = MsgType(body[1])
        except ValueError as exc:
            raise DecodeError(f"unknown message type {body[1]}") from exc
        return cls(pid, mtype, bytes(body[2:]))


def encode_opening(e: BitVector, r: Opening) -> bytes:
    """``(e, r)`` as two length-prefixed fields."""
    return Writer().bits(e).blob(r.bytes).getvalue()


def decode_opening(data: bytes) -> tuple[BitVector, Opening]:
    rd = Reader(data)
    e = rd.bits()
    r = Opening(rd.blob())
    rd.done()
    return e, r


def encode_pair(first: bytes, second: bytes) -> bytes:
    return Writer().blob(first).blob(second).getvalue()


def decode_pair(data: bytes) -> tuple[bytes, bytes]:
    rd = Reader(data)
    a, b = rd.blob(), rd.blob()
    rd.done()
    return a, b
