"""JSON fixture files for openers, procedures and mini verifiers.

Matrices are stored as ``{"rows", "cols", "data"}`` with ``data`` a row-major
list of ``[re, im]`` pairs.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..commitments.toytable import ToyTable
from ..errors import DecodeError
from .extraction import ToyAdversary
from .layout import RegisterLayout
from .minigk import MiniVerifier
from .watrous import UnitaryProcedure

KIND_ADVERSARY = "toy-adversary"
KIND_VERIFIER = "mini-verifier"
KIND_PROCEDURE = "procedure"


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError("expected a matrix")
    flat = m.reshape(-1)
    return {"rows": m.shape[0], "cols": m.shape[1],
            "data": [[float(z.real), float(z.imag)] for z in flat]}


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
        if len(data) != rows * cols:
            raise DecodeError("matrix data length does not match its shape")
        arr = np.array([complex(float(re), float(im)) for re, im in data], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise DecodeError(f"malformed matrix: {exc}") from exc
    return arr.reshape(rows, cols)


def to_json(obj) -> dict:
    if isinstance(obj, ToyAdversary):
        return {"kind": KIND_ADVERSARY, "table": obj.table.to_json(), "com": obj.com,
                "w_dim": obj.w_dim, "out_dim": obj.out_dim,
                "rho_st": matrix_to_json(obj.rho_st), "u_open": matrix_to_json(obj.u_open)}
    if isinstance(obj, MiniVerifier):
        return {"kind": KIND_VERIFIER, "name": obj.name, "table": obj.table.to_json(),
                "com_values": list(obj.com_values), "rho0": matrix_to_json(obj.rho0),
                "u_com": matrix_to_json(obj.u_com),
                "u_open": [matrix_to_json(u) for u in obj.u_open]}
    if isinstance(obj, UnitaryProcedure):
        return {"kind": KIND_PROCEDURE, "layout": [[n, d] for n, d in obj.layout.registers],
                "u": matrix_to_json(obj.u)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_json(obj: dict):
    kind = obj.get("kind")
    try:
        if kind == KIND_ADVERSARY:
            return ToyAdversary(ToyTable.from_json(obj["table"]), int(obj["com"]),
                                matrix_from_json(obj["rho_st"]), matrix_from_json(obj["u_open"]),
                                int(obj.get("w_dim", 1)), int(obj.get("out_dim", 1)))
        if kind == KIND_VERIFIER:
            return MiniVerifier(str(obj["name"]), ToyTable.from_json(obj["table"]),
                                matrix_from_json(obj["rho0"]),
                                tuple(int(c) for c in obj["com_values"]),
                                matrix_from_json(obj["u_com"]),
                                tuple(matrix_from_json(u) for u in obj["u_open"]))
        if kind == KIND_PROCEDURE:
            lay = RegisterLayout([(n, int(d)) for n, d in obj["layout"]])
            return UnitaryProcedure(lay, matrix_from_json(obj["u"]))
    except KeyError as exc:
        raise DecodeError(f"missing field {exc}") from exc
    raise DecodeError(f"unknown fixture kind {kind!r}")


def save_fixture(obj, path: str | Path) -> None:
    Path(path).write_text(json.dumps(to_json(obj)) + "\n")


def load_fixture(path: str | Path):
    try:
        return from_json(json.loads(Path(path).read_text()))
    except json.JSONDecodeError as exc:
        raise DecodeError(f"fixture is not JSON: {exc}") from exc
