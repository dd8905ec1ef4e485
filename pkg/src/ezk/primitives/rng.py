"""Seedable, platform-independent random source.

The stream is SHAKE256 in counter mode: block ``i`` is
``xof(0x04, seed, i.to_bytes(8, "big"), out_len=64)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument
from .bits import BitVector
from .xof import TAG_RNG, xof

_BLOCK = 64


@dataclass(frozen=True)
class RngSeed:
    seed: bytes

    def __post_init__(self) -> None:
        if len(self.seed) != 32:
            raise InvalidArgument("seed must be 32 bytes")

    @classmethod
    def from_int(cls, n: int) -> "RngSeed":
        return cls(int(n).to_bytes(32, "big"))


class DeterministicRng:
    def __init__(self, seed: RngSeed | int | bytes = 0):
        if isinstance(seed, int):
            seed = RngSeed.from_int(seed)
        elif isinstance(seed, (bytes, bytearray)):
            seed = RngSeed(bytes(seed))
        self.seed = seed
        self._counter = 0
        self._buf = b""

    def bytes(self, n: int) -> bytes:
        while len(self._buf) < n:
            self._buf += xof(TAG_RNG, self.seed.seed, self._counter.to_bytes(8, "big"),
                             out_len=_BLOCK)
            self._counter += 1
        out, self._buf = self._buf[:n], self._buf[n:]
        return out

    def randbits(self, k: int) -> int:
        if k <= 0:
            return 0
        v = int.from_bytes(self.bytes((k + 7) // 8), "little")
        return v & ((1 << k) - 1)

    def bitvector(self, k: int) -> BitVector:
        return BitVector(self.randbits(k), k)

    def bit(self) -> int:
        return self.randbits(1)

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise InvalidArgument("n must be positive")
        k = (n - 1).bit_length()
        while True:
            v = self.randbits(k)
            if v < n:
                return v

    def random(self) -> float:
        return self.randbits(53) / float(1 << 53)

    def permutation(self, n: int) -> list[int]:
        p = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            p[i], p[j] = p[j], p[i]
        return p

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]

    def fork(self, label: str) -> "DeterministicRng":
        """Independent child stream; does not advance this stream."""
        return DeterministicRng(RngSeed(xof(TAG_RNG, self.seed.seed, b"fork", label.encode())))

    def numpy(self) -> np.random.Generator:
        """A numpy generator seeded from this stream (PCG64 is portable)."""
        return np.random.Generator(np.random.PCG64(int.from_bytes(self.bytes(16), "big")))
