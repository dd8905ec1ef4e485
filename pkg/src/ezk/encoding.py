"""Length-prefixed canonical byte encodings.

Every composite value is written as a fixed sequence of fields.  Integers are
big-endian; variable-length byte strings carry a 4-byte length prefix; bit
vectors carry their bit length followed by the LSB-first packed bytes.
"""

from __future__ import annotations

import struct

from .errors import DecodeError
from .primitives.bits import BitVector


class Writer:
    def __init__(self) -> None:
        self._parts: list[bytes] = []

    def u8(self, v: int) -> "Writer":
        self._parts.append(struct.pack(">B", v))
        return self

    def u16(self, v: int) -> "Writer":
        self._parts.append(struct.pack(">H", v))
        return self

    def u32(self, v: int) -> "Writer":
        self._parts.append(struct.pack(">I", v))
        return self

    def blob(self, data: bytes) -> "Writer":
        self.u32(len(data))
        self._parts.append(bytes(data))
        return self

    def bits(self, bv: BitVector) -> "Writer":
        self.u32(len(bv))
        self._parts.append(bv.to_bytes())
        return self

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Reader:
    def __init__(self, data: bytes) -> None:
        self._data = bytes(data)
        self._pos = 0

    def _take(self, n: int) -> bytes:
        if n < 0 or self._pos + n > len(self._data):
            raise DecodeError("truncated input")
        out = self._data[self._pos:self._pos + n]
        self._pos += n
        return out

    def u8(self) -> int:
        return self._take(1)[0]

    def u16(self) -> int:
        return struct.unpack(">H", self._take(2))[0]

    def u32(self) -> int:
        return struct.unpack(">I", self._take(4))[0]

    def blob(self) -> bytes:
        return self._take(self.u32())

    def bits(self) -> BitVector:
        n = self.u32()
        raw = self._take((n + 7) // 8)
        value = int.from_bytes(raw, "little")
        if value >> n:
            raise DecodeError("padding bits set in bit vector")
        return BitVector(value, n)

    def done(self) -> None:
        if self._pos != len(self._data):
            raise DecodeError("trailing bytes")

    @property
    def remaining(self) -> int:
        return len(self._data) - self._pos
