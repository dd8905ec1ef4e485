"""SHAKE256 with one-byte domain separation."""

from __future__ import annotations

import hashlib

TAG_PRG = 0x01
TAG_COMMIT = 0x02
TAG_TRANSCRIPT = 0x03
TAG_RNG = 0x04


def xof(tag: int, *parts: bytes, out_len: int = 32) -> bytes:
    """SHAKE256 over ``tag || len(p0) || p0 || len(p1) || p1 ...``.

    Each part is prefixed by its 4-byte big-endian length so distinct part
    splits never collide.
    """
    h = hashlib.shake_256(bytes([tag]))
    for p in parts:
        h.update(len(p).to_bytes(4, "big"))
        h.update(p)
    return h.digest(out_len)
