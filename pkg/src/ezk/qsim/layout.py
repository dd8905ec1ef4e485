"""Named tensor-product register layouts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InvalidArgument


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered registers; the first register is the most significant index."""

    registers: tuple[tuple[str, int], ...]

    def __init__(self, registers: Sequence[tuple[str, int]]):
        regs = tuple((str(n), int(d)) for n, d in registers)
        names = [n for n, _ in regs]
        if len(set(names)) != len(names):
            raise InvalidArgument("duplicate register names")
        if any(d < 1 for _, d in regs):
            raise InvalidArgument("register dimensions must be positive")
        object.__setattr__(self, "registers", regs)

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.registers]

    @property
    def dims(self) -> list[int]:
        return [d for _, d in self.registers]

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError as exc:
            raise InvalidArgument(f"unknown register {name!r}") from exc

    def sub_dim(self, names: Sequence[str]) -> int:
        return int(np.prod([self.dims[self.index(n)] for n in names], dtype=np.int64))

    def basis_index(self, values: dict[str, int]) -> int:
        """Flat index of the basis state with the given register values (others 0)."""
        idx = 0
        for name, d in self.registers:
            v = values.get(name, 0)
            if not 0 <= v < d:
                raise InvalidArgument(f"value {v} out of range for register {name}")
            idx = idx * d + v
        return idx

    def embed(self, names: Sequence[str], op: np.ndarray) -> np.ndarray:
        """Operator ``op`` on ``names`` (in the given order) tensored with identity elsewhere."""
        names = list(names)
        k = len(self.registers)
        pos = [self.index(n) for n in names]
        sub = [self.dims[p] for p in pos]
        op = np.asarray(op, dtype=complex).reshape(sub + sub)
        rest = [i for i in range(k) if i not in pos]
        ident = np.eye(int(np.prod([self.dims[i] for i in rest], dtype=np.int64)), dtype=complex)
        ident = ident.reshape([self.dims[i] for i in rest] * 2)
        full = np.tensordot(op, ident, axes=0)
        # axes now: op_out(pos), op_in(pos), id_out(rest), id_in(rest)
        m = len(pos)
        r = len(rest)
        order_out = pos + rest
        order_in = pos + rest
        out_axes = [None] * k
        in_axes = [None] * k
        for j, reg in enumerate(order_out):
            out_axes[reg] = j if j < m else 2 * m + (j - m)
        for j, reg in enumerate(order_in):
            in_axes[reg] = m + j if j < m else 2 * m + r + (j - m)
        full = np.transpose(full, out_axes + in_axes)
        d = self.dim
        return full.reshape(d, d)

    def basis_projector(self, name: str, value: int) -> np.ndarray:
        d = self.dims[self.index(name)]
        p = np.zeros((d, d), dtype=complex)
        p[value, value] = 1
        return self.embed([name], p)

    def zero_projector(self, names: Sequence[str]) -> np.ndarray:
        """``|0><0|`` on ``names`` tensored with identity elsewhere."""
        d = self.sub_dim(names)
        p = np.zeros((d, d), dtype=complex)
        p[0, 0] = 1
        return self.embed(names, p)

    def partial_trace(self, rho: np.ndarray, keep: Sequence[str]) -> np.ndarray:
        """Reduced operator on ``keep`` (in layout order)."""
        k = len(self.registers)
        keep_idx = sorted(self.index(n) for n in keep)
        t = np.asarray(rho, dtype=complex).reshape(self.dims * 2)
        letters = "abcdefghijklmnopqrstuvwxyz"
        row = list(letters[:k])
        col = list(letters[k:2 * k])
        for i in range(k):
            if i not in keep_idx:
                col[i] = row[i]
        out = "".join(row[i] for i in keep_idx) + "".join(col[i] for i in keep_idx)
        red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
        dk = int(np.prod([self.dims[i] for i in keep_idx], dtype=np.int64))
        return red.reshape(dk, dk)

    def sandwich_basis(self, rho: np.ndarray, values: dict[str, int], keep: Sequence[str]) -> np.ndarray:
        """Project the measured registers in ``values`` onto those basis values,
        then trace out everything outside ``keep``."""
        k = len(self.registers)
        t = np.asarray(rho, dtype=complex).reshape(self.dims * 2)
        idx = [slice(None)] * (2 * k)
        for name, v in values.items():
            i = self.index(name)
            idx[i] = slice(v, v + 1)
            idx[k + i] = slice(v, v + 1)
        t = t[tuple(idx)]
        dims = list(t.shape[:k])
        sub = RegisterLayout([(n, dims[i]) for i, n in enumerate(self.names)])
        return sub.partial_trace(t.reshape(sub.dim, sub.dim), keep)

    def reorder(self, vec_or_op: np.ndarray, names: Sequence[str]) -> np.ndarray:
        """Permute a state vector into the register order ``names``."""
        perm = [self.index(n) for n in names]
        t = np.asarray(vec_or_op).reshape(self.dims)
        return np.transpose(t, perm).reshape(-1)
