"""Hamiltonicity statements, witnesses and exhaustive cycle search."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from ..encoding import Reader, Writer
from ..errors import DecodeError, InvalidArgument, Unsupported
from ..primitives.bits import BitVector

MIN_N, MAX_N = 3, 64
CERTIFY_MAX_N = 10


@dataclass(frozen=True)
class GraphInstance:
    """Undirected simple graph; ``adj[u]`` is a bitmask of neighbours of ``u``."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if not MIN_N <= self.n <= MAX_N:
            raise InvalidArgument(f"n must lie in [{MIN_N}, {MAX_N}]")
        if len(self.adj) != self.n:
            raise InvalidArgument("adjacency must have n rows")
        for u, row in enumerate(self.adj):
            if row >> self.n or (row >> u) & 1:
                raise InvalidArgument("adjacency out of range or has a self loop")
            for v in range(self.n):
                if ((row >> v) & 1) != ((self.adj[v] >> u) & 1):
                    raise InvalidArgument("adjacency must be symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[Sequence[int]]) -> "GraphInstance":
        adj = [0] * n
        for u, v in edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise InvalidArgument(f"bad edge ({u}, {v})")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    @classmethod
    def from_matrix_bits(cls, n: int, bits: BitVector) -> "GraphInstance":
        rows = [bits[u * n:(u + 1) * n].value for u in range(n)]
        return cls(n, tuple(rows))

    @classmethod
    def complete(cls, n: int) -> "GraphInstance":
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << u) for u in range(n)))

    @classmethod
    def star(cls, n: int) -> "GraphInstance":
        return cls.from_edges(n, [(0, v) for v in range(1, n)])

    @classmethod
    def cycle(cls, order: Sequence[int]) -> "GraphInstance":
        n = len(order)
        return cls.from_edges(n, [(order[i], order[(i + 1) % n]) for i in range(n)])

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in range(u + 1, self.n) if self.has_edge(u, v)]

    def matrix_bits(self) -> BitVector:
        """Row-major ``n*n`` adjacency bits."""
        value = 0
        for u, row in enumerate(self.adj):
            value |= row << (u * self.n)
        return BitVector(value, self.n * self.n)

    def permute(self, perm: Sequence[int]) -> "GraphInstance":
        """Graph with edge ``(perm[u], perm[v])`` for every edge ``(u, v)``."""
        adj = [0] * self.n
        for u in range(self.n):
            row = self.adj[u]
            pu = perm[u]
            for v in range(self.n):
                if (row >> v) & 1:
                    adj[pu] |= 1 << perm[v]
        return GraphInstance(self.n, tuple(adj))

    # serialization ------------------------------------------------------------
    def encode(self) -> bytes:
        return Writer().u8(self.n).bits(self.matrix_bits()).getvalue()

    @classmethod
    def decode(cls, data: bytes) -> "GraphInstance":
        r = Reader(data)
        n = r.u8()
        bits = r.bits()
        r.done()
        if len(bits) != n * n:
            raise DecodeError("adjacency size mismatch")
        try:
            return cls.from_matrix_bits(n, bits)
        except InvalidArgument as exc:
            raise DecodeError(str(exc)) from exc

    def to_json(self, witness: "CycleWitness | None" = None) -> dict:
        obj = {"n": self.n, "edges": [list(e) for e in self.edges()]}
        if witness is not None:
            obj["witness"] = list(witness.order)
        return obj


@dataclass(frozen=True)
class CycleWitness:
    order: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", tuple(self.order))

    def is_valid_for(self, x: GraphInstance) -> bool:
        n = x.n
        if len(self.order) != n or sorted(self.order) != list(range(n)):
            return False
        return all(x.has_edge(self.order[i], self.order[(i + 1) % n]) for i in range(n))


def load_instance(path: str | Path) -> tuple[GraphInstance, CycleWitness | None]:
    obj = json.loads(Path(path).read_text())
    return instance_from_json(obj)


def instance_from_json(obj: dict) -> tuple[GraphInstance, CycleWitness | None]:
    x = GraphInstance.from_edges(int(obj["n"]), obj.get("edges", []))
    w = CycleWitness(tuple(obj["witness"])) if obj.get("witness") is not None else None
    if w is not None and not w.is_valid_for(x):
        raise InvalidArgument("witness is not a Hamiltonian cycle of the graph")
    return x, w


def find_hamiltonian_cycle(x: GraphInstance) -> CycleWitness | None:
    """Exhaustive Held-Karp search; exact for every graph it accepts."""
    n = x.n
    if n > 20:
        raise Unsupported("exhaustive search limited to n <= 20")
    full = (1 << n) - 1
    # reach[mask] = bitmask of end vertices v such that a path 0 -> v covers mask
    reach = [0] * (1 << n)
    reach[1] = 1
    for mask in range(1, 1 << n):
        if not mask & 1 or not reach[mask]:
            continue
        ends = reach[mask]
        v = 0
        while ends:
            if ends & 1:
                nxt = x.adj[v] & ~mask
                while nxt:
                    u = (nxt & -nxt).bit_length() - 1
                    reach[mask | (1 << u)] |= 1 << u
                    nxt &= nxt - 1
            ends >>= 1
            v += 1
    closing = [v for v in range(1, n) if (reach[full] >> v) & 1 and x.has_edge(v, 0)]
    if not closing:
        return None
    # walk back
    order = [closing[0]]
    mask = full
    while len(order) < n:
        v = order[-1]
        prev_mask = mask & ~(1 << v)
        u = next(u for u in range(n)
                 if (reach[prev_mask] >> u) & 1 and x.has_edge(u, v)
                 and (len(order) < n - 1 or u == 0))
        order.append(u)
        mask = prev_mask
    order.reverse()
    return CycleWitness(tuple(order))


def is_hamiltonian(x: GraphInstance) -> bool:
    return find_hamiltonian_cycle(x) is not None


def cycle_positions(order: Sequence[int]) -> list[tuple[int, int]]:
    n = len(order)
    return [(order[i], order[(i + 1) % n]) for i in range(n)]


def positions_form_hamiltonian_cycle(n: int, positions: Sequence[tuple[int, int]]) -> bool:
    """True iff the undirected edges ``positions`` form one cycle through all ``n`` vertices."""
    if len(positions) != n:
        return False
    edges = set()
    deg = [0] * n
    for u, v in positions:
        if not (0 <= u < n and 0 <= v < n) or u == v:
            return False
        e = (min(u, v), max(u, v))
        if e in edges:
            return False
        edges.add(e)
        deg[u] += 1
        deg[v] += 1
    if any(d != 2 for d in deg):
        return False
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in nbrs[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


def instance_gen(n: int, extra_edge_prob: float, want_member: bool, rng,
                 retries: int = 1000) -> tuple[GraphInstance, CycleWitness | None]:
    """Random member (planted cycle) or certified non-member instance."""
    if not MIN_N <= n <= MAX_N:
        raise InvalidArgument(f"n must lie in [{MIN_N}, {MAX_N}]")
    if not 0.0 <= extra_edge_prob <= 1.0:
        raise InvalidArgument("edge probability must lie in [0, 1]")
    threshold = int(extra_edge_prob * (1 << 32))
    if want_member:
        order = tuple(rng.permutation(n))
        edges = set(tuple(sorted(e)) for e in cycle_positions(order))
        for u in range(n):
            for v in range(u + 1, n):
                if (u, v) not in edges and rng.randbits(32) < threshold:
                    edges.add((u, v))
        x = GraphInstance.from_edges(n, sorted(edges))
        w = CycleWitness(order)
        assert w.is_valid_for(x)
        return x, w
    if n > CERTIFY_MAX_N:
        raise Unsupported(f"non-member certification needs n <= {CERTIFY_MAX_N}")
    for _ in range(retries):
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.randbits(32) < threshold]
        x = GraphInstance.from_edges(n, edges)
        if not is_hamiltonian(x):
            return x, None
    raise Unsupported("failed to sample a non-Hamiltonian graph; lower the edge probability")
