"""Black-box unitary handles.

Extraction and simulation code receives a :class:`UnitaryOracle` and can only
apply the wrapped unitary or its inverse; the matrix itself stays private.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..errors import InvalidArgument
from .linalg import check_unitary


class UnitaryOracle:
    __slots__ = ("_u", "_fwd", "_adj", "_dim", "_queries")

    def __init__(self, u, *, check: bool = True):
        self._u = check_unitary(u) if check else np.asarray(u, dtype=complex)
        self._dim = self._u.shape[0]
        self._fwd = lambda v: self._u @ v
        self._adj = lambda v: self._u.conj().T @ v
        self._queries = 0

    @classmethod
    def structured(cls, dim: int, forward: Callable, adjoint: Callable) -> "UnitaryOracle":
        """Oracle from a pair of functions acting on column batches of shape ``(dim, k)``."""
        self = cls.__new__(cls)
        self._u = None
        self._dim = int(dim)
        self._fwd = forward
        self._adj = adjoint
        self._queries = 0
        return self

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def queries(self) -> int:
        return self._queries

    def _shape(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if v.shape[0] != self.dim:
            raise InvalidArgument("dimension mismatch with oracle")
        return v

    def _call(self, fn, v) -> np.ndarray:
        self._queries += 1
        v = self._shape(v)
        if v.ndim == 1:
            return fn(v[:, None])[:, 0]
        return fn(v)

    def apply(self, v) -> np.ndarray:
        """``U v`` for a vector or a matrix of column vectors."""
        return self._call(self._fwd, v)

    def apply_adjoint(self, v) -> np.ndarray:
        return self._call(self._adj, v)

    def conjugate(self, op) -> np.ndarray:
        """``U^dagger op U`` using two oracle calls on a dense operator."""
        left = self.apply_adjoint(np.asarray(op, dtype=complex))
        return self.apply_adjoint(left.conj().T).conj().T

    def __repr__(self) -> str:
        return f"UnitaryOracle(dim={self.dim})"
