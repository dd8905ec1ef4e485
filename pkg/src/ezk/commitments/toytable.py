"""Explicit lookup-table commitments over tiny message and randomness spaces.

``table[m * 2**r_bits + r]`` is the commitment to message ``m`` under
randomness ``r``.  Tables are small enough for every property to be checked
by enumeration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..encoding import Reader, Writer
from ..errors import DecodeError, InvalidArgument, Unsupported
from ..primitives.bits import BitVector

MAX_BITS = 8

BINDING = "binding"
STRICT = "strict-binding"
NON_BINDING = "non-binding"


@dataclass(frozen=True)
class ToyTable:
    m_bits: int
    r_bits: int
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        if not (0 <= self.m_bits <= MAX_BITS and 0 <= self.r_bits <= MAX_BITS):
            raise InvalidArgument("message and randomness spaces are limited to 2^8")
        if len(self.table) != (1 << self.m_bits) << self.r_bits:
            raise InvalidArgument("table must have |M|*|R| entries")
        if any(not 0 <= c < 1 << 32 for c in self.table):
            raise InvalidArgument("commitment values must fit in 32 bits")

    @property
    def n_messages(self) -> int:
        return 1 << self.m_bits

    @property
    def n_rand(self) -> int:
        return 1 << self.r_bits

    def lookup(self, m: int, r: int) -> int:
        return self.table[(m << self.r_bits) | r]

    def openings(self, com: int) -> list[tuple[int, int]]:
        """All ``(m, r)`` pairs producing ``com``."""
        return [(i >> self.r_bits, i & (self.n_rand - 1))
                for i, c in enumerate(self.table) if c == com]

    def messages_for(self, com: int) -> set[int]:
        return {m for m, _ in self.openings(com)}

    def values(self) -> set[int]:
        return set(self.table)

    # classification -------------------------------------------------------
    def is_binding(self) -> bool:
        owner: dict[int, int] = {}
        for i, c in enumerate(self.table):
            m = i >> self.r_bits
            if owner.setdefault(c, m) != m:
                return False
        return True

    def is_strict_binding(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def binding_class(self) -> str:
        if self.is_strict_binding():
            return STRICT
        return BINDING if self.is_binding() else NON_BINDING

    # constructors ------------------------------------------------------------
    @classmethod
    def one_time_pad(cls, bits: int) -> "ToyTable":
        n = 1 << bits
        return cls(bits, bits, tuple(m ^ r for m in range(n) for r in range(n)))

    @classmethod
    def identity(cls, m_bits: int, r_bits: int = 0) -> "ToyTable":
        return cls(m_bits, r_bits, tuple(m for m in range(1 << m_bits) for _ in range(1 << r_bits)))

    @classmethod
    def generate(cls, m_bits: int, r_bits: int, klass: str, rng, max_tries: int = 10_000) -> "ToyTable":
        """Rejection-sample a uniformly random table of the requested class."""
        size = (1 << m_bits) << r_bits
        if klass == NON_BINDING:
            space = max(2, size // 2)
        else:
            space = max(4, size * size)
        check = {BINDING: lambda t: t.is_binding() and not t.is_strict_binding(),
                 STRICT: cls.is_strict_binding,
                 NON_BINDING: lambda t: not t.is_binding()}.get(klass)
        if check is None:
            raise InvalidArgument(f"unknown binding class {klass!r}")
        if klass == BINDING and r_bits == 0:
            raise InvalidArgument("a non-injective binding table needs randomness")
        if klass == NON_BINDING and m_bits == 0:
            raise InvalidArgument("a single message is always binding")
        for _ in range(max_tries):
            if klass == BINDING:
                # collisions must stay within one message; sample per-message pools
                t = cls(m_bits, r_bits, tuple(
                    rng.randbelow(space) for _ in range(size)))
                t = _fold_within_messages(t, rng)
            else:
                t = cls(m_bits, r_bits, tuple(rng.randbelow(space) for _ in range(size)))
            if check(t):
                return t
        raise Unsupported("could not sample a table of the requested class")

    # serialization -----------------------------------------------------------
    def encode(self) -> bytes:
        w = Writer().u8(self.m_bits).u8(self.r_bits)
        for c in self.table:
            w.u32(c)
        return w.getvalue()

    @classmethod
    def decode(cls, data: bytes) -> "ToyTable":
        r = Reader(data)
        m_bits, r_bits = r.u8(), r.u8()
        if m_bits > MAX_BITS or r_bits > MAX_BITS:
            raise DecodeError("space too large")
        table = tuple(r.u32() for _ in range((1 << m_bits) << r_bits))
        r.done()
        return cls(m_bits, r_bits, table)

    def to_json(self) -> dict:
        return {"m_bits": self.m_bits, "r_bits": self.r_bits,
                "table": [format(c, "x") for c in self.table]}

    @classmethod
    def from_json(cls, obj: dict) -> "ToyTable":
        return cls(int(obj["m_bits"]), int(obj["r_bits"]), tuple(int(h, 16) for h in obj["table"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "ToyTable":
        return cls.from_json(json.loads(Path(path).read_text()))


def _fold_within_messages(t: ToyTable, rng) -> ToyTable:
    # force one repeated value inside a random message row so the table is
    # binding without being injective
    m = rng.randbelow(t.n_messages)
    r0, r1 = rng.randbelow(t.n_rand), rng.randbelow(t.n_rand)
    while r1 == r0:
        r1 = rng.randbelow(t.n_rand)
    table = list(t.table)
    table[(m << t.r_bits) | r1] = table[(m << t.r_bits) | r0]
    return ToyTable(t.m_bits, t.r_bits, tuple(table))


def commit(t: ToyTable, m: BitVector, rng) -> tuple[bytes, bytes]:
    if len(m) != t.m_bits:
        raise InvalidArgument("message length mismatch")
    r = rng.randbelow(t.n_rand)
    return encode_value(t.lookup(m.value, r)), BitVector(r, t.r_bits).to_bytes()


def encode_value(c: int) -> bytes:
    return Writer().u32(c).getvalue()


def decode_value(data: bytes) -> int:
    r = Reader(data)
    c = r.u32()
    r.done()
    return c


def verify_open(t: ToyTable, com: bytes, m: BitVector, opening: bytes) -> bool:
    if len(m) != t.m_bits:
        return False
    try:
        c = decode_value(com)
        r = BitVector.from_bytes(opening, t.r_bits)
    except (DecodeError, InvalidArgument):
        return False
    return t.lookup(m.value, r.value) == c
