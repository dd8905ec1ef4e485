"""Commitment schemes behind one dispatch surface.

``setup`` / ``commit`` / ``verify_open`` accept any of the three schemes.
Scheme parameters live in ``PublicParam.bytes`` and are decoded once.
"""

from __future__ import annotations

from ..errors import DecodeError, InvalidArgument
from ..primitives.bits import BitVector
from ..primitives.prg import XOF_MODE
from . import halevi_micali, naor, toytable
from .base import Commitment, Opening, PublicParam, SchemeId
from .halevi_micali import HMParams
from .naor import NaorParams
from .toytable import ToyTable

MAX_LAMBDA = 256


def decode_params(scheme: SchemeId, body: bytes):
    try:
        if scheme is SchemeId.NAOR:
            return NaorParams.decode(body)
        if scheme is SchemeId.HM:
            return HMParams.decode(body)
        return ToyTable.decode(body)
    except InvalidArgument as exc:
        raise DecodeError(str(exc)) from exc


def wrap(params) -> PublicParam:
    """Build a PublicParam from decoded scheme parameters."""
    if isinstance(params, NaorParams):
        scheme = SchemeId.NAOR
    elif isinstance(params, HMParams):
        scheme = SchemeId.HM
    elif isinstance(params, ToyTable):
        scheme = SchemeId.TOY
    else:
        raise InvalidArgument(f"not commitment parameters: {params!r}")
    return PublicParam(scheme, params.encode(), params)


def setup(scheme: SchemeId, lam: int, rng, *, prg_mode: str = XOF_MODE,
          msg_len: int | None = None, hash_len: int | None = None,
          table: ToyTable | None = None) -> PublicParam:
    """Sample public parameters.

    ``lam`` is the security parameter.  Halevi-Micali needs ``msg_len`` and
    uses ``hash_len = lam`` unless given.  ToyTable needs an explicit table.
    """
    if not 2 <= lam <= MAX_LAMBDA:
        raise InvalidArgument(f"lambda must lie in [2, {MAX_LAMBDA}]")
    if scheme is SchemeId.NAOR:
        return wrap(naor.setup(lam, rng, prg_mode))
    if scheme is SchemeId.HM:
        if msg_len is None:
            raise InvalidArgument("Halevi-Micali setup needs msg_len")
        return wrap(halevi_micali.setup(msg_len, hash_len or lam, rng))
    if table is None:
        raise InvalidArgument("ToyTable setup needs a table")
    return wrap(table)


def _params(pp: PublicParam):
    if pp.params is not None:
        return pp.params
    return decode_params(pp.scheme, pp.bytes)


def commit(pp: PublicParam, m: BitVector, rng) -> tuple[Commitment, Opening]:
    p = _params(pp)
    if pp.scheme is SchemeId.NAOR:
        c, o = naor.commit(p, m, rng)
    elif pp.scheme is SchemeId.HM:
        c, o = halevi_micali.commit(p, m, rng)
    else:
        c, o = toytable.commit(p, m, rng)
    return Commitment(pp.scheme, c), Opening(o)


def verify_open(pp: PublicParam, com: Commitment, m: BitVector, opening: Opening) -> bool:
    """True iff ``opening`` recomputes ``com`` for message ``m``; never raises."""
    try:
        p = _params(pp)
    except DecodeError:
        return False
    if not isinstance(com, Commitment) or com.scheme is not pp.scheme:
        return False
    if not isinstance(m, BitVector) or not isinstance(opening, Opening):
        return False
    if pp.scheme is SchemeId.NAOR:
        return naor.verify_open(p, com.bytes, m, opening.bytes)
    if pp.scheme is SchemeId.HM:
        return halevi_micali.verify_open(p, com.bytes, m, opening.bytes)
    return toytable.verify_open(p, com.bytes, m, opening.bytes)


__all__ = [
    "Commitment",
    "Opening",
    "PublicParam",
    "SchemeId",
    "NaorParams",
    "HMParams",
    "ToyTable",
    "setup",
    "commit",
    "verify_open",
    "wrap",
    "decode_params",
]
