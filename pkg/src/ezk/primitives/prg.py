"""Length-tripling generators used inside Naor commitments."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidArgument
from .bits import BitVector, GF2Matrix
from .xof import TAG_PRG, xof

LINEAR_TOY = "linear-toy"
XOF_MODE = "xof"


@dataclass(frozen=True)
class PrgSpec:
    """Generator description.

    ``linear-toy`` multiplies the seed by a public matrix.  It is not
    pseudorandom and exists only so that tiny instances are exhaustively
    analysable and compile to XOR-only circuits.
    """

    mode: str
    seed_len: int
    out_len: int
    matrix: GF2Matrix | None = None

    def __post_init__(self) -> None:
        if self.mode not in (LINEAR_TOY, XOF_MODE):
            raise InvalidArgument(f"unknown PRG mode {self.mode!r}")
        if self.seed_len <= 0 or self.out_len <= 0:
            raise InvalidArgument("lengths must be positive")
        if self.mode == LINEAR_TOY:
            if self.matrix is None:
                raise InvalidArgument("linear-toy mode needs a matrix")
            if (self.matrix.rows, self.matrix.cols) != (self.out_len, self.seed_len):
                raise InvalidArgument("matrix shape must be out_len x seed_len")
        elif self.matrix is not None:
            raise InvalidArgument("xof mode takes no matrix")

    @classmethod
    def linear(cls, matrix: GF2Matrix) -> "PrgSpec":
        return cls(LINEAR_TOY, matrix.cols, matrix.rows, matrix)

    @classmethod
    def random_linear(cls, seed_len: int, out_len: int, rng) -> "PrgSpec":
        return cls.linear(GF2Matrix.random(out_len, seed_len, rng))


def prg_expand(spec: PrgSpec, seed: BitVector) -> BitVector:
    if len(seed) != spec.seed_len:
        raise InvalidArgument("seed length mismatch")
    if spec.mode == LINEAR_TOY:
        return spec.matrix.mul_vec(seed)
    raw = xof(TAG_PRG, seed.to_bytes(), out_len=(spec.out_len + 7) // 8)
    value = int.from_bytes(raw, "little") & ((1 << spec.out_len) - 1)
    return BitVector(value, spec.out_len)
