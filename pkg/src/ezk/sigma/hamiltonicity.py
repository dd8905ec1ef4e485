"""Parallel Blum Hamiltonicity in two flavors.

``plain``: each repetition commits the adjacency matrix of a random
isomorphic copy ``pi(x)``.  Challenge bit 0 opens everything and reveals
``pi``; challenge bit 1 opens the entries of the image of the witness cycle.

``modified``: each repetition commits the message ``pi(x) || enc(pi)`` so the
permutation itself is bound by the commitment.  This makes the unique
answerable challenge of a cheating prover computable from the committed
messages (see :func:`f_bad`).

Per-repetition message layout: bits ``u*n + v`` hold ``H[u][v]``; in the
modified flavor they are followed by ``n`` permutation images of
:func:`perm_width` bits each, least significant bit first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..commitments import Commitment, Opening
from ..encoding import Reader, Writer
from ..errors import DecodeError, InvalidArgument
from ..primitives.bits import BitVector
from .context import CommitContext
from .graph import CycleWitness, GraphInstance, cycle_positions, positions_form_hamiltonian_cycle

PLAIN = "plain"
MODIFIED = "modified"
_FLAVOR_CODE = {PLAIN: 0, MODIFIED: 1}


def perm_width(n: int) -> int:
    return max(1, (n - 1).bit_length())


def message_len(n: int, flavor: str) -> int:
    return n * n + (n * perm_width(n) if flavor == MODIFIED else 0)


def encode_perm(perm: Sequence[int]) -> BitVector:
    w = perm_width(len(perm))
    return BitVector.concat([BitVector(p, w) for p in perm])


def decode_perm(bits: BitVector, n: int) -> tuple[int, ...] | None:
    w = perm_width(n)
    if len(bits) != n * w:
        return None
    perm = tuple(bits[i * w:(i + 1) * w].value for i in range(n))
    if sorted(perm) != list(range(n)):
        return None
    return perm


def encode_message(H: GraphInstance, perm: Sequence[int]) -> BitVector:
    return H.matrix_bits() + encode_perm(perm)


def decode_message(m: BitVector, n: int) -> tuple[BitVector, tuple[int, ...] | None]:
    """Split a modified-flavor message into adjacency bits and permutation."""
    if len(m) != message_len(n, MODIFIED):
        return BitVector(0, 0), None
    return m[:n * n], decode_perm(m[n * n:], n)


# --- value types ------------------------------------------------------------------

@dataclass(frozen=True)
class SigmaFirstMsg:
    flavor: str
    n: int
    reps: tuple[tuple[Commitment, ...], ...]

    def encode(self) -> bytes:
        w = Writer().u8(_FLAVOR_CODE[self.flavor]).u8(self.n).u16(len(self.reps))
        for rep in self.reps:
            w.u32(len(rep))
            for c in rep:
                w.blob(c.encode())
        return w.getvalue()

    @classmethod
    def decode(cls, data: bytes) -> "SigmaFirstMsg":
        r = Reader(data)
        code = r.u8()
        flavor = {v: k for k, v in _FLAVOR_CODE.items()}.get(code)
        if flavor is None:
            raise DecodeError("unknown flavor")
        n = r.u8()
        reps = []
        for _ in range(r.u16()):
            count = r.u32()
            if count > r.remaining:
                raise DecodeError("commitment count exceeds input")
            reps.append(tuple(Commitment.decode(r.blob()) for _ in range(count)))
        r.done()
        return cls(flavor, n, tuple(reps))


@dataclass(frozen=True)
class OpenAll:
    """Answer to challenge bit 0."""

    openings: tuple[Opening, ...]
    perm: tuple[int, ...] | None = None     # plain flavor
    bits: BitVector | None = None           # modified flavor


@dataclass(frozen=True)
class OpenCycle:
    """Answer to challenge bit 1: opened positions ``(u, v)`` all holding 1."""

    positions: tuple[tuple[int, int], ...]
    openings: tuple[Opening, ...]


@dataclass(frozen=True)
class SigmaResponse:
    reps: tuple[OpenAll | OpenCycle, ...]

    def encode(self) -> bytes:
        w = Writer().u16(len(self.reps))
        for rep in self.reps:
            if isinstance(rep, OpenAll):
                w.u8(0)
                if rep.perm is None:
                    w.u8(0)
                else:
                    w.u8(1).blob(bytes(rep.perm))
                if rep.bits is None:
                    w.u8(0)
                else:
                    w.u8(1).bits(rep.bits)
            else:
                w.u8(1).u16(len(rep.positions))
                for u, v in rep.positions:
                    w.u8(u).u8(v)
            w.u32(len(rep.openings))
            for o in rep.openings:
                w.blob(o.bytes)
        return w.getvalue()

    @classmethod
    def decode(cls, data: bytes) -> "SigmaResponse":
        r = Reader(data)
        reps: list[OpenAll | OpenCycle] = []
        for _ in range(r.u16()):
            kind = r.u8()
            if kind == 0:
                perm = tuple(r.blob()) if r.u8() else None
                bits = r.bits() if r.u8() else None
                openings = _read_openings(r)
                reps.append(OpenAll(openings, perm, bits))
            elif kind == 1:
                positions = tuple((r.u8(), r.u8()) for _ in range(r.u16()))
                reps.append(OpenCycle(positions, _read_openings(r)))
            else:
                raise DecodeError("unknown response kind")
        r.done()
        return cls(tuple(reps))


def _read_openings(r: Reader) -> tuple[Opening, ...]:
    count = r.u32()
    if count > r.remaining:
        raise DecodeError("opening count exceeds input")
    return tuple(Opening(r.blob()) for _ in range(count))


@dataclass
class SigmaState:
    x: GraphInstance
    flavor: str
    perms: list[tuple[int, ...]]
    messages: list[BitVector]
    openings: list[list[Opening]]
    first: SigmaFirstMsg


# --- prover ---------------------------------------------------------------------------

def _commit_messages(x: GraphInstance, flavor: str, perms, messages, ctx: CommitContext, rng) -> SigmaState:
    reps, opens = [], []
    for m in messages:
        coms, ops = ctx.commit_bits(m, rng)
        reps.append(tuple(coms))
        opens.append(ops)
    first = SigmaFirstMsg(flavor, x.n, tuple(reps))
    return SigmaState(x, flavor, list(perms), list(messages), opens, first)


def sigma_p1(x: GraphInstance, lam_reps: int, ctx: CommitContext, rng) -> tuple[SigmaFirstMsg, SigmaState]:
    """First message of the plain flavor; uses only the statement."""
    if lam_reps < 1:
        raise InvalidArgument("need at least one repetition")
    perms = [tuple(rng.permutation(x.n)) for _ in range(lam_reps)]
    messages = [x.permute(p).matrix_bits() for p in perms]
    st = _commit_messages(x, PLAIN, perms, messages, ctx, rng)
    return st.first, st


def _open_cycle(st: SigmaState, i: int, order: Sequence[int]) -> OpenCycle:
    n = st.x.n
    perm = st.perms[i]
    positions = tuple((perm[u], perm[v]) for u, v in cycle_positions(order))
    return OpenCycle(positions, tuple(st.openings[i][u * n + v] for u, v in positions))


def _respond(st: SigmaState, w: CycleWitness, e: BitVector) -> SigmaResponse:
    if not w.is_valid_for(st.x):
        raise InvalidArgument("witness is not a Hamiltonian cycle of the statement")
    if len(e) != len(st.perms):
        raise InvalidArgument("challenge length must equal the repetition count")
    reps = []
    for i in range(len(st.perms)):
        if e[i] == 0:
            reps.append(_open_all(st, i))
        else:
            reps.append(_open_cycle(st, i, w.order))
    return SigmaResponse(tuple(reps))


def _open_all(st: SigmaState, i: int) -> OpenAll:
    if st.flavor == PLAIN:
        return OpenAll(tuple(st.openings[i]), perm=st.perms[i])
    return OpenAll(tuple(st.openings[i]), bits=st.messages[i])


def sigma_p3(st: SigmaState, w: CycleWitness, e: BitVector) -> SigmaResponse:
    return _respond(st, w, e)


# --- verifier ---------------------------------------------------------------------------

def _check_open_all(x: GraphInstance, flavor: str, coms, rep: OpenAll, ctx: CommitContext) -> bool:
    n = x.n
    if flavor == PLAIN:
        if rep.perm is None or rep.bits is not None:
            return False
        if sorted(rep.perm) != list(range(n)):
            return False
        bits = x.permute(rep.perm).matrix_bits()
    else:
        if rep.bits is None or rep.perm is not None:
            return False
        H, perm = decode_message(rep.bits, n)
        if perm is None or H != x.permute(perm).matrix_bits():
            return False
        bits = rep.bits
    if len(rep.openings) != len(coms) or len(bits) != len(coms):
        return False
    return all(ctx.verify_bit(c, b, o) for c, b, o in zip(coms, bits, rep.openings))


def _check_open_cycle(n: int, coms, rep: OpenCycle, ctx: CommitContext) -> bool:
    if not positions_form_hamiltonian_cycle(n, rep.positions):
        return False
    if len(rep.openings) != n:
        return False
    return all(ctx.verify_bit(coms[u * n + v], 1, o) for (u, v), o in zip(rep.positions, rep.openings))


def verify_rep(x: GraphInstance, flavor: str, coms, bit: int, rep, ctx: CommitContext) -> bool:
    if len(coms) != message_len(x.n, flavor):
        return False
    if bit == 0:
        return isinstance(rep, OpenAll) and _check_open_all(x, flavor, coms, rep, ctx)
    return isinstance(rep, OpenCycle) and _check_open_cycle(x.n, coms, rep, ctx)


def _verify(x: GraphInstance, flavor: str, ctx: CommitContext, a: SigmaFirstMsg,
            e: BitVector, z: SigmaResponse) -> bool:
    try:
        if a.flavor != flavor or a.n != x.n:
            return False
        if not (len(a.reps) == len(e) == len(z.reps)):
            return False
        return all(verify_rep(x, flavor, a.reps[i], e[i], z.reps[i], ctx) for i in range(len(e)))
    except (InvalidArgument, DecodeError, IndexError, TypeError, AttributeError):
        return False


def sigma_verify(x: GraphInstance, ctx: CommitContext, a: SigmaFirstMsg, e: BitVector,
                 z: SigmaResponse) -> bool:
    return _verify(x, PLAIN, ctx, a, e, z)


# --- simulation ----------------------------------------------------------------------------

def _random_cycle_order(n: int, rng) -> tuple[int, ...]:
    return tuple(rng.permutation(n))


def sigma_sim(x: GraphInstance, e: BitVector, ctx: CommitContext, rng) -> tuple[SigmaFirstMsg, SigmaResponse]:
    """Accepting transcript for a known challenge, without a witness."""
    perms, messages, cycles = [], [], []
    for i in range(len(e)):
        perm = tuple(rng.permutation(x.n))
        if e[i] == 0:
            messages.append(x.permute(perm).matrix_bits())
            cycles.append(None)
        else:
            order = _random_cycle_order(x.n, rng)
            messages.append(GraphInstance.cycle(order).matrix_bits())
            cycles.append(order)
        perms.append(perm)
    st = _commit_messages(x, PLAIN, perms, messages, ctx, rng)
    reps = []
    for i, order in enumerate(cycles):
        if order is None:
            reps.append(_open_all(st, i))
        else:
            # identity permutation: positions are the cycle edges themselves
            st.perms[i] = tuple(range(x.n))
            reps.append(_open_cycle(st, i, order))
    return st.first, SigmaResponse(tuple(reps))


# --- modified flavor ---------------------------------------------------------------------

def mh_samp(x: GraphInstance, lam_reps: int, rng) -> list[BitVector]:
    if lam_reps < 1:
        raise InvalidArgument("need at least one repetition")
    out = []
    for _ in range(lam_reps):
        perm = tuple(rng.permutation(x.n))
        out.append(encode_message(x.permute(perm), perm))
    return out


def mh_commit(x: GraphInstance, messages: Sequence[BitVector], ctx: CommitContext,
              rng) -> tuple[SigmaFirstMsg, SigmaState]:
    perms = []
    for m in messages:
        if len(m) != message_len(x.n, MODIFIED):
            raise InvalidArgument("message length mismatch")
        perms.append(decode_message(m, x.n)[1])
    st = _commit_messages(x, MODIFIED, perms, messages, ctx, rng)
    return st.first, st


def mh_resp(st: SigmaState, w: CycleWitness, e: BitVector) -> SigmaResponse:
    if any(p is None for p in st.perms):
        raise InvalidArgument("state holds a message that is not a permutation encoding")
    return _respond(st, w, e)


def mh_verify(x: GraphInstance, ctx: CommitContext, a: SigmaFirstMsg, e: BitVector,
              z: SigmaResponse) -> bool:
    return _verify(x, MODIFIED, ctx, a, e, z)


def mh_simsamp(x: GraphInstance, e: BitVector, rng) -> list[BitVector]:
    out = []
    for i in range(len(e)):
        perm = tuple(rng.permutation(x.n))
        if e[i] == 0:
            out.append(encode_message(x.permute(perm), perm))
        else:
            out.append(encode_message(GraphInstance.cycle(_random_cycle_order(x.n, rng)), perm))
    return out


def _trace_cycle(H: GraphInstance) -> tuple[int, ...] | None:
    """Vertex order of ``H`` if it is exactly one Hamiltonian cycle."""
    n = H.n
    if any(row.bit_count() != 2 for row in H.adj):
        return None
    order = [0]
    prev = -1
    while len(order) < n:
        u = order[-1]
        nxt = [v for v in range(n) if H.has_edge(u, v) and v != prev]
        if not nxt:
            return None
        prev = u
        order.append(nxt[0])
    if len(set(order)) != n or not H.has_edge(order[-1], order[0]):
        return None
    return tuple(order)


def mh_simresp(st: SigmaState, e: BitVector) -> SigmaResponse:
    """Response for simulated messages: bit 0 opens all, bit 1 opens the committed cycle."""
    n = st.x.n
    reps = []
    for i in range(len(e)):
        if e[i] == 0:
            reps.append(_open_all(st, i))
            continue
        H = GraphInstance.from_matrix_bits(n, st.messages[i][:n * n])
        order = _trace_cycle(H)
        if order is None:
            raise InvalidArgument("repetition does not commit a Hamiltonian cycle graph")
        positions = tuple(cycle_positions(order))
        reps.append(OpenCycle(positions, tuple(st.openings[i][u * n + v] for u, v in positions)))
    return SigmaResponse(tuple(reps))


# --- bad challenge and special soundness ---------------------------------------------------

def f_bad(messages: Sequence[BitVector], x: GraphInstance) -> BitVector:
    """Bit ``i`` is 0 iff message ``i`` is a consistent ``(pi(x), pi)`` pair."""
    bits = []
    for m in messages:
        H, perm = decode_message(m, x.n)
        bits.append(0 if perm is not None and H == x.permute(perm).matrix_bits() else 1)
    return BitVector.from_bits(bits)


def extract_cycle(x: GraphInstance, rep0: OpenAll, rep1: OpenCycle) -> CycleWitness:
    """Witness from the two answers of one repetition sharing a first message."""
    n = x.n
    if rep0.perm is not None:
        perm = rep0.perm
    else:
        perm = decode_message(rep0.bits, n)[1]
        if perm is None:
            raise InvalidArgument("opened message is not a permutation encoding")
    C = GraphInstance.from_edges(n, rep1.positions)
    order = _trace_cycle(C)
    if order is None:
        raise InvalidArgument("opened positions are not a Hamiltonian cycle")
    inv = [0] * n
    for u, pu in enumerate(perm):
        inv[pu] = u
    w = CycleWitness(tuple(inv[c] for c in order))
    if not w.is_valid_for(x):
        raise InvalidArgument("transcripts are inconsistent with a binding commitment")
    return w
