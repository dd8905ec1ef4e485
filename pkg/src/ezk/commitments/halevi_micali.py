"""Statistically hiding commitments from a universal hash and a keyed XOF.

To commit to ``m`` (``n`` bits) pick a full-rank Toeplitz map ``f`` from
``L = 4*l + 2*n + 4`` bits to ``n`` bits and a uniform ``r`` with
``f(r) = m``; the commitment is ``(H_k(r), f)`` with ``|H_k(r)| = l``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..encoding import Reader, Writer
from ..errors import DecodeError, InvalidArgument, RankDeficient
from ..primitives.bits import BitVector
from ..primitives.toeplitz import ToeplitzHash, universal_hash_eval, universal_hash_sample_preimage
from ..primitives.xof import TAG_COMMIT, xof


def input_length(msg_len: int, hash_len: int) -> int:
    return 4 * hash_len + 2 * msg_len + 4


@dataclass(frozen=True)
class HMParams:
    msg_len: int
    hash_len: int
    key: bytes

    @property
    def in_len(self) -> int:
        return input_length(self.msg_len, self.hash_len)

    def encode(self) -> bytes:
        return Writer().u16(self.msg_len).u16(self.hash_len).blob(self.key).getvalue()

    @classmethod
    def decode(cls, data: bytes) -> "HMParams":
        r = Reader(data)
        n, l, key = r.u16(), r.u16(), r.blob()
        r.done()
        if n < 1 or l < 1:
            raise DecodeError("bad lengths")
        return cls(n, l, key)


def setup(msg_len: int, hash_len: int, rng) -> HMParams:
    if msg_len < 1 or hash_len < 1:
        raise InvalidArgument("lengths must be positive")
    return HMParams(msg_len, hash_len, rng.bytes(32))


def keyed_hash(p: HMParams, r: BitVector) -> BitVector:
    raw = xof(TAG_COMMIT, p.key, r.to_bytes(), out_len=(p.hash_len + 7) // 8)
    return BitVector(int.from_bytes(raw, "little") & ((1 << p.hash_len) - 1), p.hash_len)


def _encode_com(y: BitVector, f: ToeplitzHash) -> bytes:
    return Writer().bits(y).bits(f.diag).bits(f.offset).getvalue()


def decode_commitment(p: HMParams, data: bytes) -> tuple[BitVector, ToeplitzHash]:
    r = Reader(data)
    y, diag, offset = r.bits(), r.bits(), r.bits()
    r.done()
    if len(y) != p.hash_len:
        raise DecodeError("hash output length mismatch")
    try:
        f = ToeplitzHash(p.in_len, p.msg_len, diag, offset)
    except InvalidArgument as exc:
        raise DecodeError(str(exc)) from exc
    return y, f


def sample_hash(p: HMParams, rng) -> ToeplitzHash:
    while True:
        f = ToeplitzHash.random(p.in_len, p.msg_len, rng)
        if f.is_full_rank():
            return f


def commit(p: HMParams, m: BitVector, rng) -> tuple[bytes, bytes]:
    if len(m) != p.msg_len:
        raise InvalidArgument("message length mismatch")
    while True:
        f = sample_hash(p, rng)
        try:
            r = universal_hash_sample_preimage(f, m, rng)
        except RankDeficient:  # pragma: no cover - sample_hash already filters
            continue
        return _encode_com(keyed_hash(p, r), f), r.to_bytes()


def verify_open(p: HMParams, com: bytes, m: BitVector, opening: bytes) -> bool:
    if len(m) != p.msg_len:
        return False
    try:
        y, f = decode_commitment(p, com)
        r = BitVector.from_bytes(opening, p.in_len)
    except (DecodeError, InvalidArgument):
        return False
    if not f.is_full_rank():
        return False
    return universal_hash_eval(f, r) == m and keyed_hash(p, r) == y
