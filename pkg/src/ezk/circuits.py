"""Boolean circuits over {XOR, AND, NOT, CONST0, CONST1}.

Wires ``0 .. n_inputs-1`` are inputs; gate ``g`` drives wire ``n_inputs + g``.
Gates are stored in topological order, which the constructor checks.

Text format::

    circuit v1
    inputs <n_inputs>
    outputs <w0> <w1> ...
    <wire> XOR <a> <b>
    <wire> AND <a> <b>
    <wire> NOT <a>
    <wire> CONST0
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

from .commitments import Commitment, Opening, PublicParam, SchemeId
from .commitments.naor import NaorParams
from .commitments.toytable import ToyTable, decode_value
from .commitments import naor as naor_mod
from .errors import DecodeError, InvalidArgument, Unsupported
from .primitives.bits import BitVector
from .primitives.prg import LINEAR_TOY

XOR, AND, NOT, CONST0, CONST1 = "XOR", "AND", "NOT", "CONST0", "CONST1"
_ARITY = {XOR: 2, AND: 2, NOT: 1, CONST0: 0, CONST1: 0}
TABLE_GUARD = 1 << 10


@dataclass(frozen=True)
class Gate:
    op: str
    a: int = -1
    b: int = -1


@dataclass(frozen=True)
class Circuit:
    n_inputs: int
    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]

    def __post_init__(self) -> None:
        for wire, g in enumerate(self.gates, self.n_inputs):
            arity = _ARITY.get(g.op)
            if arity is None:
                raise InvalidArgument(f"unknown gate {g.op!r}")
            if (arity > 0 and not 0 <= g.a < wire) or (arity > 1 and not 0 <= g.b < wire):
                raise InvalidArgument(f"gate {wire} reads an undefined wire")
        n_wires = self.n_wires
        if any(not 0 <= o < n_wires for o in self.outputs):
            raise InvalidArgument("output refers to an undefined wire")

    @property
    def n_wires(self) -> int:
        return self.n_inputs + len(self.gates)

    @property
    def n_outputs(self) -> int:
        return len(self.outputs)

    def count(self, op: str | None = None) -> int:
        if op is None:
            return len(self.gates)
        return sum(1 for g in self.gates if g.op == op)

    @property
    def and_count(self) -> int:
        return self.count(AND)

    # serialization -----------------------------------------------------------
    def to_text(self) -> str:
        lines = ["circuit v1", f"inputs {self.n_inputs}",
                 "outputs " + " ".join(map(str, self.outputs))]
        for g_idx, g in enumerate(self.gates):
            wire = self.n_inputs + g_idx
            args = [str(x) for x in (g.a, g.b)[:_ARITY[g.op]]]
            lines.append(" ".join([str(wire), g.op, *args]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if len(lines) < 3 or lines[0] != "circuit v1":
            raise DecodeError("missing circuit header")
        try:
            key, val = lines[1].split()
            if key != "inputs":
                raise DecodeError("expected inputs line")
            n_inputs = int(val)
            parts = lines[2].split()
            if parts[0] != "outputs":
                raise DecodeError("expected outputs line")
            outputs = tuple(int(p) for p in parts[1:])
            gates = []
            for k, ln in enumerate(lines[3:]):
                toks = ln.split()
                if int(toks[0]) != n_inputs + k:
                    raise DecodeError("gate ids must be consecutive")
                op = toks[1]
                if op not in _ARITY or len(toks) != 2 + _ARITY[op]:
                    raise DecodeError(f"malformed gate line {ln!r}")
                args = [int(t) for t in toks[2:]] + [-1, -1]
                gates.append(Gate(op, args[0], args[1]))
            return cls(n_inputs, tuple(gates), outputs)
        except (ValueError, IndexError, InvalidArgument) as exc:
            raise DecodeError(str(exc)) from exc


class CircuitBuilder:
    def __init__(self, n_inputs: int):
        self.n_inputs = n_inputs
        self.gates: list[Gate] = []
        self._consts: dict[str, int] = {}

    def _add(self, g: Gate) -> int:
        self.gates.append(g)
        return self.n_inputs + len(self.gates) - 1

    def xor(self, a: int, b: int) -> int:
        return self._add(Gate(XOR, a, b))

    def and_(self, a: int, b: int) -> int:
        return self._add(Gate(AND, a, b))

    def not_(self, a: int) -> int:
        return self._add(Gate(NOT, a))

    def const(self, bit: int) -> int:
        op = CONST1 if bit else CONST0
        if op not in self._consts:
            self._consts[op] = self._add(Gate(op))
        return self._consts[op]

    def xor_all(self, wires: Sequence[int]) -> int:
        if not wires:
            return self.const(0)
        acc = wires[0]
        for w in wires[1:]:
            acc = self.xor(acc, w)
        return acc

    def build(self, outputs: Sequence[int]) -> Circuit:
        return Circuit(self.n_inputs, tuple(self.gates), tuple(outputs))


def eval_wires(c: Circuit, inputs: BitVector) -> list[int]:
    if len(inputs) != c.n_inputs:
        raise InvalidArgument("input width mismatch")
    vals = inputs.to_list()
    for g in c.gates:
        op = g.op
        if op == XOR:
            vals.append(vals[g.a] ^ vals[g.b])
        elif op == AND:
            vals.append(vals[g.a] & vals[g.b])
        elif op == NOT:
            vals.append(vals[g.a] ^ 1)
        else:
            vals.append(1 if op == CONST1 else 0)
    return vals


def eval_circuit(c: Circuit, inputs: BitVector) -> BitVector:
    vals = eval_wires(c, inputs)
    return BitVector.from_bits([vals[o] for o in c.outputs]) if c.outputs else BitVector(0, 0)


# --- commitment relation ----------------------------------------------------------------

@dataclass(frozen=True)
class RelationLayout:
    """Where each commitment's message and randomness sit in the input vector."""

    k: int
    msg_len: int
    rand_len: int
    com_len: int

    @property
    def n_inputs(self) -> int:
        return self.k * (self.msg_len + self.rand_len)


def relation_layout(pp: PublicParam, msg_len: int, k: int) -> RelationLayout:
    if pp.scheme is SchemeId.NAOR:
        p: NaorParams = pp.params
        return RelationLayout(k, msg_len, msg_len * p.lam, msg_len * p.block_len)
    if pp.scheme is SchemeId.TOY:
        t: ToyTable = pp.params
        if msg_len != t.m_bits:
            raise InvalidArgument("message length must match the table")
        return RelationLayout(k, t.m_bits, t.r_bits, _toy_com_bits(t))
    raise Unsupported("only linear-toy Naor and ToyTable commitments compile to circuits")


def _toy_com_bits(t: ToyTable) -> int:
    return max(1, max(t.table).bit_length())


@functools.lru_cache(maxsize=16)
def build_commit_relation_circuit(pp: PublicParam, msg_len: int, k: int) -> Circuit:
    """Circuit mapping ``(m_1, r_1, ..., m_k, r_k)`` to the ``k`` commitments' bits."""
    lay = relation_layout(pp, msg_len, k)
    b = CircuitBuilder(lay.n_inputs)
    outputs: list[int] = []
    if pp.scheme is SchemeId.NAOR:
        p: NaorParams = pp.params
        if p.prg.mode != LINEAR_TOY:
            raise Unsupported("XOF-based Naor commitments are not circuit friendly")
        rows = p.prg.matrix.row_ints()
        R = p.R.value
        for i in range(k):
            base = i * (lay.msg_len + lay.rand_len)
            for j in range(msg_len):
                mbit = base + j
                seed0 = base + msg_len + j * p.lam
                for t, row in enumerate(rows):
                    terms = [seed0 + s for s in range(p.lam) if (row >> s) & 1]
                    if (R >> t) & 1:
                        terms.append(mbit)
                    outputs.append(b.xor_all(terms))
    else:
        t: ToyTable = pp.params
        if len(t.table) > TABLE_GUARD:
            raise Unsupported(f"table compilation limited to {TABLE_GUARD} entries")
        nvars = t.m_bits + t.r_bits
        for i in range(k):
            base = i * (lay.msg_len + lay.rand_len)
            # variable order: table index bits, LSB first = r bits then m bits
            var_wires = [base + t.m_bits + q for q in range(t.r_bits)] + \
                        [base + q for q in range(t.m_bits)]
            memo: dict[tuple[int, ...], int] = {}
            for bit in range(lay.com_len):
                truth = tuple((c >> bit) & 1 for c in t.table)
                outputs.append(_shannon(b, truth, var_wires, nvars, memo))
    return b.build(outputs)


def _shannon(b: CircuitBuilder, truth: tuple[int, ...], var_wires, nvars: int, memo) -> int:
    """Wire computing the function with the given truth table (index bit q = variable q)."""
    if truth in memo:
        return memo[truth]
    if all(v == 0 for v in truth):
        w = b.const(0)
    elif all(v == 1 for v in truth):
        w = b.const(1)
    else:
        # split on the highest variable: f = f0 xor x * (f0 xor f1)
        half = len(truth) // 2
        top = var_wires[nvars - 1]
        f0, f1 = truth[:half], truth[half:]
        w0 = _shannon(b, f0, var_wires, nvars - 1, memo)
        diff = tuple(u ^ v for u, v in zip(f0, f1))
        if all(v == 0 for v in diff):
            w = w0
        else:
            wd = _shannon(b, diff, var_wires, nvars - 1, memo)
            if all(v == 1 for v in diff):
                prod = top
            else:
                prod = b.and_(top, wd)
            w = prod if all(v == 0 for v in f0) else b.xor(w0, prod)
    memo[truth] = w
    return w


def relation_target(pp: PublicParam, coms: Sequence[Commitment]) -> BitVector:
    """Expected circuit output for a list of commitments."""
    parts = []
    for c in coms:
        if c.scheme is not pp.scheme:
            raise InvalidArgument("commitment scheme mismatch")
        if pp.scheme is SchemeId.NAOR:
            parts.extend(naor_mod.decode_commitment(pp.params, c.bytes))
        elif pp.scheme is SchemeId.TOY:
            parts.append(BitVector(decode_value(c.bytes), _toy_com_bits(pp.params)))
        else:
            raise Unsupported("scheme is not circuit friendly")
    return BitVector.concat(parts)


def relation_witness(pp: PublicParam, messages: Sequence[BitVector],
                     openings: Sequence[Opening]) -> BitVector:
    """Circuit input vector for the given openings."""
    parts = []
    for m, o in zip(messages, openings, strict=True):
        if pp.scheme is SchemeId.NAOR:
            r = BitVector.from_bytes(o.bytes, len(m) * pp.params.lam)
        else:
            r = BitVector.from_bytes(o.bytes, pp.params.r_bits)
        parts.extend([m, r])
    return BitVector.concat(parts)


def split_witness(pp: PublicParam, bits: BitVector, msg_len: int, k: int) -> tuple[list[BitVector], list[Opening]]:
    lay = relation_layout(pp, msg_len, k)
    msgs, opens = [], []
    stride = lay.msg_len + lay.rand_len
    for i in range(k):
        chunk = bits[i * stride:(i + 1) * stride]
        msgs.append(chunk[:lay.msg_len])
        opens.append(Opening(chunk[lay.msg_len:].to_bytes()))
    return msgs, opens
