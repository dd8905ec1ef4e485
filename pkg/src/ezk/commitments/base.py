"""Scheme-independent commitment value types."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

from ..encoding import Reader, Writer
from ..errors import DecodeError


class SchemeId(enum.Enum):
    NAOR = "NaorSB"
    HM = "HaleviMicaliSH"
    TOY = "ToyTable"

    @property
    def code(self) -> int:
        return _CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "SchemeId":
        for k, v in _CODES.items():
            if v == code:
                return k
        raise DecodeError(f"unknown scheme code {code}")


_CODES = {SchemeId.NAOR: 1, SchemeId.HM: 2, SchemeId.TOY: 3}


@dataclass(frozen=True)
class PublicParam:
    scheme: SchemeId
    bytes: bytes
    # decoded scheme parameters, cached for speed; not part of identity
    params: Any = field(default=None, compare=False, repr=False)

    def encode(self) -> bytes:
        return Writer().u8(self.scheme.code).blob(self.bytes).getvalue()

    @classmethod
    def decode(cls, data: bytes) -> "PublicParam":
        from . import decode_params  # local import: dispatch lives in the package

        r = Reader(data)
        scheme = SchemeId.from_code(r.u8())
        body = r.blob()
        r.done()
        return cls(scheme, body, decode_params(scheme, body))


@dataclass(frozen=True)
class Commitment:
    scheme: SchemeId
    bytes: bytes

    def encode(self) -> bytes:
        return Writer().u8(self.scheme.code).blob(self.bytes).getvalue()

    @classmethod
    def decode(cls, data: bytes) -> "Commitment":
        r = Reader(data)
        scheme = SchemeId.from_code(r.u8())
        body = r.blob()
        r.done()
        return cls(scheme, body)


@dataclass(frozen=True)
class Opening:
    bytes: bytes

    def encode(self) -> bytes:
        return Writer().blob(self.bytes).getvalue()

    @classmethod
    def decode(cls, data: bytes) -> "Opening":
        r = Reader(data)
        body = r.blob()
        r.done()
        return cls(body)
