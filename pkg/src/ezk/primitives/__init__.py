"""Bit strings, GF(2) algebra, XOF hashing, PRGs, Toeplitz hashing and RNG."""

from .bits import BitVector, GF2Matrix, gf2_solve
from .prg import PrgSpec, prg_expand
from .rng import DeterministicRng, RngSeed
from .toeplitz import ToeplitzHash, universal_hash_eval, universal_hash_sample_preimage
from .xof import TAG_COMMIT, TAG_PRG, TAG_RNG, TAG_TRANSCRIPT, xof

__all__ = [
    "BitVector",
    "GF2Matrix",
    "gf2_solve",
    "PrgSpec",
    "prg_expand",
    "DeterministicRng",
    "RngSeed",
    "ToeplitzHash",
    "universal_hash_eval",
    "universal_hash_sample_preimage",
    "TAG_COMMIT",
    "TAG_PRG",
    "TAG_RNG",
    "TAG_TRANSCRIPT",
    "xof",
]
