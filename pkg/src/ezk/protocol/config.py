"""Run configuration and the scheme-pairing lint."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass

from ..errors import InvalidArgument
from ..primitives.prg import LINEAR_TOY, XOF_MODE

PROOF = "proof"
ARGUMENT = "argument"


@dataclass(frozen=True)
class ProtocolConfig:
    """Parameters shared by both parties.

    ``lam`` sizes every commitment scheme, ``lam_reps`` is the number of
    parallel Sigma repetitions (and the challenge length), ``wipok_reps`` the
    repetition count inside the WIPoK of the argument.
    """

    mode: str = PROOF
    lam: int = 16
    lam_reps: int = 8
    challenge_scheme: str = "HaleviMicaliSH"
    sigma_scheme: str = "NaorSB"
    sigma_prg: str = XOF_MODE
    hm_hash_len: int | None = None
    wipok_reps: int = 4
    wipok_lam: int | None = None
    split_frames: bool = False

    @classmethod
    def proof(cls, **kw) -> "ProtocolConfig":
        return cls(mode=PROOF, challenge_scheme="HaleviMicaliSH", sigma_scheme="NaorSB", **kw)

    @classmethod
    def argument(cls, **kw) -> "ProtocolConfig":
        kw.setdefault("sigma_prg", LINEAR_TOY)
        return cls(mode=ARGUMENT, challenge_scheme="NaorSB", sigma_scheme="NaorSB", **kw)

    @property
    def protocol_id(self) -> int:
        return 1 if self.mode == PROOF else 2

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "ProtocolConfig":
        return cls(**obj)

    def digest(self) -> bytes:
        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).digest()


def lint_config(cfg: ProtocolConfig) -> None:
    """Reject configurations outside the two supported scheme pairings."""
    if cfg.mode == PROOF:
        if cfg.challenge_scheme != "HaleviMicaliSH" or cfg.sigma_scheme != "NaorSB":
            raise InvalidArgument("proof mode pairs Halevi-Micali challenge commitments "
                                  "with receiver-chosen Naor Sigma commitments")
    elif cfg.mode == ARGUMENT:
        if cfg.challenge_scheme != "NaorSB" or cfg.sigma_scheme != "NaorSB":
            raise InvalidArgument("argument mode pairs Naor challenge commitments "
                                  "with Naor commitments for Modified Hamiltonicity")
        if cfg.sigma_prg != LINEAR_TOY:
            raise InvalidArgument("the WIPoK openings branch needs circuit-friendly "
                                  "(linear-toy) Sigma commitments")
        if cfg.wipok_reps < 1:
            raise InvalidArgument("wipok_reps must be positive")
    else:
        raise InvalidArgument(f"unknown mode {cfg.mode!r}")
    if cfg.sigma_prg not in (LINEAR_TOY, XOF_MODE):
        raise InvalidArgument("unknown PRG mode")
    if not 2 <= cfg.lam <= 256:
        raise InvalidArgument("lambda must lie in [2, 256]")
    if not 1 <= cfg.lam_reps <= 256:
        raise InvalidArgument("lam_reps must lie in [1, 256]")
