"""Classical-quantum output ensembles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

import numpy as np

from .linalg import trace_distance


@dataclass
class CQEnsemble:
    """Classical outcomes with subnormalized quantum parts, plus a bottom mass."""

    parts: dict[Hashable, np.ndarray] = field(default_factory=dict)
    bottom: float = 0.0

    @property
    def total(self) -> float:
        return self.bottom + sum(float(np.trace(v).real) for v in self.parts.values())

    def prob(self, key) -> float:
        v = self.parts.get(key)
        return 0.0 if v is None else float(np.trace(v).real)

    def add(self, key, op: np.ndarray) -> None:
        if key in self.parts:
            self.parts[key] = self.parts[key] + op
        else:
            self.parts[key] = np.array(op, dtype=complex)

    def scaled(self, c: float) -> "CQEnsemble":
        return CQEnsemble({k: c * v for k, v in self.parts.items()}, c * self.bottom)

    def normalized(self) -> "CQEnsemble":
        return self.scaled(1.0 / self.total)


def ensemble_distance(a: CQEnsemble, b: CQEnsemble) -> float:
    """Trace distance of the block-diagonal states; bottom is one extra classical symbol."""
    td = 0.0
    for key in set(a.parts) | set(b.parts):
        x = a.parts.get(key)
        y = b.parts.get(key)
        if x is None:
            x = np.zeros_like(y)
        if y is None:
            y = np.zeros_like(x)
        td += trace_distance(x, y)
    return td + abs(a.bottom - b.bottom) / 2
