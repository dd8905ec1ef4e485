"""Bit vectors and dense GF(2) matrices.

Bit packing convention, used everywhere in the package: bit ``i`` of a vector
is bit ``i % 8`` (least significant first) of byte ``i // 8``.  Internally a
vector is a Python integer whose bit ``i`` is vector bit ``i``, so packing is
``int.to_bytes(..., "little")``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import InvalidArgument


@dataclass(frozen=True)
class BitVector:
    value: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 0:
            raise InvalidArgument("negative length")
        if self.value < 0 or self.value >> self.length:
            raise InvalidArgument("value does not fit declared length")

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(0, n)

    @classmethod
    def ones(cls, n: int) -> "BitVector":
        return cls((1 << n) - 1, n)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        value = 0
        n = 0
        for i, b in enumerate(bits):
            if b not in (0, 1, True, False):
                raise InvalidArgument(f"not a bit: {b!r}")
            if b:
                value |= 1 << i
            n = i + 1
        return cls(value, n)

    @classmethod
    def from_str(cls, s: str) -> "BitVector":
        """Parse ``"0110"`` with the first character as bit 0."""
        return cls.from_bits(int(c) for c in s)

    @classmethod
    def from_bytes(cls, data: bytes, length: int | None = None) -> "BitVector":
        if length is None:
            length = 8 * len(data)
        if len(data) != (length + 7) // 8:
            raise InvalidArgument("byte length does not match bit length")
        value = int.from_bytes(data, "little")
        if value >> length:
            raise InvalidArgument("padding bits set")
        return cls(value, length)

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitVector":
        return cls(value, length)

    # views ---------------------------------------------------------------
    @property
    def bits(self) -> bytes:
        return self.to_bytes()

    def to_bytes(self) -> bytes:
        return self.value.to_bytes((self.length + 7) // 8, "little")

    def to_list(self) -> list[int]:
        v = self.value
        return [(v >> i) & 1 for i in range(self.length)]

    def to_numpy(self) -> np.ndarray:
        return np.array(self.to_list(), dtype=np.uint8)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.to_list())

    def __len__(self) -> int:
        return self.length

    def __iter__(self):
        return iter(self.to_list())

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            start, stop, step = idx.indices(self.length)
            if step == 1:
                n = max(0, stop - start)
                return BitVector((self.value >> start) & ((1 << n) - 1), n)
            return BitVector.from_bits(self.to_list()[idx])
        if idx < 0:
            idx += self.length
        if not 0 <= idx < self.length:
            raise IndexError(idx)
        return (self.value >> idx) & 1

    # algebra -------------------------------------------------------------
    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise InvalidArgument("length mismatch in xor")
        return BitVector(self.value ^ other.value, self.length)

    def __add__(self, other: "BitVector") -> "BitVector":
        """Concatenation: ``self`` occupies the low positions."""
        return BitVector(self.value | (other.value << self.length), self.length + other.length)

    def weight(self) -> int:
        return self.value.bit_count()

    def dot(self, other: "BitVector") -> int:
        return (self.value & other.value).bit_count() & 1

    def flip(self, i: int) -> "BitVector":
        if not 0 <= i < self.length:
            raise IndexError(i)
        return BitVector(self.value ^ (1 << i), self.length)

    @staticmethod
    def concat(parts: Sequence["BitVector"]) -> "BitVector":
        value = 0
        n = 0
        for p in parts:
            value |= p.value << n
            n += p.length
        return BitVector(value, n)

    def chunks(self, size: int) -> list["BitVector"]:
        if size <= 0 or self.length % size:
            raise InvalidArgument("length is not a multiple of chunk size")
        return [self[i:i + size] for i in range(0, self.length, size)]


class GF2Matrix:
    """Dense matrix over GF(2); each row is an int holding ``cols`` bits."""

    __slots__ = ("rows", "cols", "_rows")

    def __init__(self, rows: int, cols: int, row_ints: Sequence[int]):
        if len(row_ints) != rows:
            raise InvalidArgument("row count mismatch")
        mask = (1 << cols) - 1
        for r in row_ints:
            if r < 0 or r & ~mask:
                raise InvalidArgument("row exceeds column count")
        self.rows = rows
        self.cols = cols
        self._rows = tuple(row_ints)

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]) -> "GF2Matrix":
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        if any(len(r) != cols for r in entries):
            raise InvalidArgument("ragged matrix")
        return cls(rows, cols, [BitVector.from_bits(r).value for r in entries])

    @classmethod
    def from_bytes(cls, rows: int, cols: int, data: bytes) -> "GF2Matrix":
        stride = (cols + 7) // 8
        if len(data) != rows * stride:
            raise InvalidArgument("data length must be rows * ceil(cols/8)")
        out = []
        for i in range(rows):
            out.append(BitVector.from_bytes(data[i * stride:(i + 1) * stride], cols).value)
        return cls(rows, cols, out)

    @classmethod
    def identity(cls, n: int) -> "GF2Matrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "GF2Matrix":
        return cls(rows, cols, [0] * rows)

    @classmethod
    def random(cls, rows: int, cols: int, rng) -> "GF2Matrix":
        return cls(rows, cols, [rng.randbits(cols) for _ in range(rows)])

    @property
    def data(self) -> bytes:
        stride = (self.cols + 7) // 8
        return b"".join(r.to_bytes(stride, "little") for r in self._rows)

    def row(self, i: int) -> BitVector:
        return BitVector(self._rows[i], self.cols)

    def row_ints(self) -> tuple[int, ...]:
        return self._rows

    def entry(self, i: int, j: int) -> int:
        return (self._rows[i] >> j) & 1

    def to_numpy(self) -> np.ndarray:
        return np.array([[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)],
                        dtype=np.uint8)

    def mul_vec(self, x: BitVector) -> BitVector:
        if len(x) != self.cols:
            raise InvalidArgument("vector length must equal column count")
        xv = x.value
        out = 0
        for i, r in enumerate(self._rows):
            if (r & xv).bit_count() & 1:
                out |= 1 << i
        return BitVector(out, self.rows)

    def transpose(self) -> "GF2Matrix":
        cols = [0] * self.cols
        for i, r in enumerate(self._rows):
            j = 0
            while r:
                if r & 1:
                    cols[j] |= 1 << i
                r >>= 1
                j += 1
        return GF2Matrix(self.cols, self.rows, cols)

    def rank(self) -> int:
        return len(_echelon(list(self._rows), self.cols)[1])

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, GF2Matrix) and self.rows == other.rows
                and self.cols == other.cols and self._rows == other._rows)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._rows))

    def __repr__(self) -> str:
        return f"GF2Matrix({self.rows}x{self.cols})"


def _echelon(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form over the first ``ncols`` bits.

    Returns the reduced rows and the pivot column of each leading row.
    """
    rows = list(rows)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        bit = 1 << c
        pivot = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def gf2_solve(A: GF2Matrix, b: BitVector) -> tuple[BitVector, list[BitVector]] | None:
    """Solve ``A x = b``.

    Returns ``(particular, kernel_basis)`` or ``None`` when the system is
    inconsistent.
    """
    if len(b) != A.rows:
        raise InvalidArgument("right-hand side length must equal row count")
    n = A.cols
    aug = [r | (((b.value >> i) & 1) << n) for i, r in enumerate(A.row_ints())]
    red, pivots = _echelon(aug, n)
    rhs_bit = 1 << n
    for i in range(len(pivots), len(red)):
        if red[i] & rhs_bit:
            return None
    particular = 0
    for i, c in enumerate(pivots):
        if red[i] & rhs_bit:
            particular |= 1 << c
    pivot_set = set(pivots)
    kernel = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = 1 << f
        for i, c in enumerate(pivots):
            if (red[i] >> f) & 1:
                v |= 1 << c
        kernel.append(BitVector(v, n))
    return BitVector(particular, n), kernel
