"""Three-move branch protocols with binary per-repetition challenges."""

from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Any

from ..circuits import AND, CONST1, NOT, XOR, Circuit, eval_wires
from ..commitments import Commitment, Opening
from ..encoding import Reader, Writer
from ..errors import DecodeError, InvalidArgument
from ..primitives.bits import BitVector
from ..sigma import (CommitContext, CycleWitness, GraphInstance, OpenAll, OpenCycle, SigmaFirstMsg,
                     SigmaResponse, extract_cycle, sigma_p1, sigma_p3, sigma_sim, sigma_verify)


class BranchProtocol(abc.ABC):
    """Sigma-protocol contract used by the OR composition.

    Challenges live in ``{0,1}^k_reps``.  Implementations guarantee special
    soundness (:meth:`extract`) and special honest-verifier zero knowledge
    (:meth:`simulate`).
    """

    k_reps: int

    @abc.abstractmethod
    def first(self, statement, witness, rng) -> tuple[Any, Any]:
        """First message and prover state."""

    @abc.abstractmethod
    def respond(self, st, witness, e: BitVector) -> Any:
        ...

    @abc.abstractmethod
    def verify(self, statement, a, e: BitVector, z) -> bool:
        ...

    @abc.abstractmethod
    def simulate(self, statement, e: BitVector, rng) -> tuple[Any, Any]:
        ...

    @abc.abstractmethod
    def extract(self, statement, a, e1: BitVector, z1, e2: BitVector, z2):
        """Witness from two accepting transcripts with ``e1 != e2``."""

    @abc.abstractmethod
    def encode_first(self, a) -> bytes: ...

    @abc.abstractmethod
    def decode_first(self, data: bytes): ...

    @abc.abstractmethod
    def encode_response(self, z) -> bytes: ...

    @abc.abstractmethod
    def decode_response(self, data: bytes): ...


def _differing_coordinate(e1: BitVector, e2: BitVector) -> int:
    diff = (e1 ^ e2).value
    if not diff:
        raise InvalidArgument("challenges must differ")
    return (diff & -diff).bit_length() - 1


class BlumBranch(BranchProtocol):
    """Plain parallel Blum Hamiltonicity; statement ``x``, witness a cycle."""

    def __init__(self, ctx: CommitContext, k_reps: int):
        self.ctx = ctx
        self.k_reps = k_reps

    def first(self, x: GraphInstance, witness, rng):
        return sigma_p1(x, self.k_reps, self.ctx, rng)

    def respond(self, st, witness: CycleWitness, e):
        return sigma_p3(st, witness, e)

    def verify(self, x, a, e, z) -> bool:
        return sigma_verify(x, self.ctx, a, e, z)

    def simulate(self, x, e, rng):
        return sigma_sim(x, e, self.ctx, rng)

    def extract(self, x, a, e1, z1, e2, z2) -> CycleWitness:
        j = _differing_coordinate(e1, e2)
        r1, r2 = z1.reps[j], z2.reps[j]
        rep0, rep1 = (r1, r2) if e1[j] == 0 else (r2, r1)
        if not (isinstance(rep0, OpenAll) and isinstance(rep1, OpenCycle)):
            raise InvalidArgument("responses do not match their challenge bits")
        return extract_cycle(x, rep0, rep1)

    def encode_first(self, a: SigmaFirstMsg) -> bytes:
        return a.encode()

    def decode_first(self, data: bytes) -> SigmaFirstMsg:
        return SigmaFirstMsg.decode(data)

    def encode_response(self, z: SigmaResponse) -> bytes:
        return z.encode()

    def decode_response(self, data: bytes) -> SigmaResponse:
        return SigmaResponse.decode(data)


# --- circuit proof of knowledge ------------------------------------------------------

@dataclass(frozen=True)
class GarblerView:
    """Answer to bit 0: all wire masks of inputs and AND outputs."""

    masks: BitVector
    openings: tuple[Opening, ...]


@dataclass(frozen=True)
class EvaluatorView:
    """Answer to bit 1: masked inputs and one table row per AND gate."""

    masked_inputs: BitVector
    rows: BitVector
    openings: tuple[Opening, ...]


@dataclass(frozen=True)
class GarbledRep:
    """First message of one repetition."""

    coms: tuple[Commitment, ...]
    out_masks: BitVector


@dataclass
class _RepSecrets:
    bits: list[int]
    openings: list[Opening]
    masks: list[int]
    masked: list[int]


class CircuitPoKBranch(BranchProtocol):
    """Proof of knowledge of ``w`` with ``C(w) = y``, linear in circuit size.

    Two parties are emulated per repetition.  The garbler picks a random mask
    for every input and AND output (XOR and NOT masks follow linearly) and
    writes a masked truth table per AND gate, indexed by masked inputs.  The
    evaluator holds the masked input values and walks the circuit, reading one
    table row per AND gate.  The prover commits to both views and publishes
    the output masks; challenge bit 0 opens the garbler, bit 1 opens the
    evaluator.  Output masks leak nothing: the evaluator view determines them
    as ``masked_outputs xor y`` and the garbler view as a function of the
    masks.  Both openings together reveal ``w = masked_inputs xor input_masks``.

    Committed bits per repetition, in order: input and AND-output masks, four
    rows per AND gate, masked inputs.
    """

    def __init__(self, ctx: CommitContext, k_reps: int):
        self.ctx = ctx
        self.k_reps = k_reps

    # layout helpers -------------------------------------------------------------
    @staticmethod
    def _and_gates(c: Circuit) -> list[int]:
        return [g for g, gate in enumerate(c.gates) if gate.op == AND]

    @staticmethod
    def _segments(c: Circuit) -> tuple[int, int, int]:
        n_and = c.and_count
        m = c.n_inputs + n_and
        t = m + 4 * n_and
        return m, t, t + c.n_inputs

    @staticmethod
    def _wire_masks(c: Circuit, mask_bits: list[int]) -> list[int]:
        lam = list(mask_bits[:c.n_inputs])
        k = c.n_inputs
        for gate in c.gates:
            if gate.op == XOR:
                lam.append(lam[gate.a] ^ lam[gate.b])
            elif gate.op == NOT:
                lam.append(lam[gate.a])
            elif gate.op == AND:
                lam.append(mask_bits[k])
                k += 1
            else:
                lam.append(0)
        return lam

    @staticmethod
    def _tables(c: Circuit, lam: list[int]) -> list[int]:
        rows = []
        base = c.n_inputs
        for g, gate in enumerate(c.gates):
            if gate.op != AND:
                continue
            la, lb, lc = lam[gate.a], lam[gate.b], lam[base + g]
            for beta in (0, 1):
                for alpha in (0, 1):
                    rows.append(((alpha ^ la) & (beta ^ lb)) ^ lc)
        return rows  # row index alpha + 2*beta

    @staticmethod
    def _evaluate_masked(c: Circuit, masked_inputs: list[int], and_rows) -> tuple[list[int], list[int]]:
        """Masked wire values; ``and_rows(k, index)`` yields the k-th AND row."""
        vals = list(masked_inputs)
        used = []
        k = 0
        for gate in c.gates:
            if gate.op == XOR:
                vals.append(vals[gate.a] ^ vals[gate.b])
            elif gate.op == NOT:
                vals.append(vals[gate.a] ^ 1)
            elif gate.op == AND:
                idx = vals[gate.a] + 2 * vals[gate.b]
                used.append(idx)
                vals.append(and_rows(k, idx))
                k += 1
            else:
                vals.append(1 if gate.op == CONST1 else 0)
        return vals, used

    def _commit(self, bits: list[int], rng) -> tuple[tuple[Commitment, ...], list[Opening]]:
        coms, opens = [], []
        for b in bits:
            c, o = self.ctx.commit_bit(b, rng)
            coms.append(c)
            opens.append(o)
        return tuple(coms), opens

    def _garble(self, c: Circuit, rng) -> tuple[list[int], list[int], list[int]]:
        n_mask = c.n_inputs + c.and_count
        mbits = rng.bitvector(n_mask).to_list() if n_mask else []
        lam = self._wire_masks(c, mbits)
        return mbits, lam, self._tables(c, lam)

    # protocol ---------------------------------------------------------------------
    def first(self, statement, witness: BitVector, rng):
        c, y = statement
        if len(witness) != c.n_inputs:
            raise InvalidArgument("witness width mismatch")
        vals = eval_wires(c, witness)
        if [vals[o] for o in c.outputs] != y.to_list():
            raise InvalidArgument("witness does not satisfy the circuit")
        reps, secrets = [], []
        for _ in range(self.k_reps):
            mbits, lam, table = self._garble(c, rng)
            masked = [v ^ l for v, l in zip(vals, lam)]
            out_masks = BitVector.from_bits([lam[o] for o in c.outputs])
            bits = mbits + table + masked[:c.n_inputs]
            coms, opens = self._commit(bits, rng)
            reps.append(GarbledRep(coms, out_masks))
            secrets.append(_RepSecrets(bits, opens, mbits, masked))
        return tuple(reps), (c, secrets)

    def respond(self, st, witness, e: BitVector):
        c, secrets = st
        if len(e) != self.k_reps:
            raise InvalidArgument("challenge length mismatch")
        return tuple(self._open(c, s.bits, s.openings, e[i], s.masked[:c.n_inputs])
                     for i, s in enumerate(secrets))

    def _open(self, c: Circuit, bits, opens, bit: int, masked_inputs) -> GarblerView | EvaluatorView:
        m_end, t_end, v_end = self._segments(c)
        if bit == 0:
            return GarblerView(BitVector.from_bits(bits[:m_end]), tuple(opens[:t_end]))
        table = bits[m_end:t_end]
        _, used = self._evaluate_masked(c, masked_inputs, lambda k, ix: table[4 * k + ix])
        row_idx = [m_end + 4 * k + ix for k, ix in enumerate(used)]
        idx = list(range(t_end, v_end)) + row_idx
        return EvaluatorView(BitVector.from_bits(masked_inputs),
                             BitVector.from_bits([bits[i] for i in row_idx]),
                             tuple(opens[i] for i in idx))

    def verify(self, statement, a, e: BitVector, z) -> bool:
        try:
            c, y = statement
            if not (len(a) == len(e) == len(z) == self.k_reps):
                return False
            return all(self._verify_rep(c, y, a[i], e[i], z[i]) for i in range(self.k_reps))
        except (InvalidArgument, DecodeError, IndexError, TypeError, AttributeError):
            return False

    def _verify_rep(self, c: Circuit, y: BitVector, rep: GarbledRep, bit: int, view) -> bool:
        m_end, t_end, v_end = self._segments(c)
        coms = rep.coms
        if len(coms) != v_end or len(rep.out_masks) != c.n_outputs:
            return False
        vb = self.ctx.verify_bit
        if bit == 0:
            if not isinstance(view, GarblerView) or len(view.masks) != m_end:
                return False
            mbits = view.masks.to_list()
            lam = self._wire_masks(c, mbits)
            if [lam[o] for o in c.outputs] != rep.out_masks.to_list():
                return False
            expected = mbits + self._tables(c, lam)
            if len(view.openings) != t_end:
                return False
            return all(vb(coms[i], b, o) for i, (b, o) in enumerate(zip(expected, view.openings)))
        if not isinstance(view, EvaluatorView):
            return False
        if len(view.masked_inputs) != c.n_inputs or len(view.rows) != c.and_count:
            return False
        rows = view.rows.to_list()
        vals, used = self._evaluate_masked(c, view.masked_inputs.to_list(), lambda k, ix: rows[k])
        out = [vals[o] ^ mk for o, mk in zip(c.outputs, rep.out_masks.to_list())]
        if out != y.to_list():
            return False
        idx = list(range(t_end, v_end)) + [m_end + 4 * k + ix for k, ix in enumerate(used)]
        expected = view.masked_inputs.to_list() + rows
        if len(view.openings) != len(idx):
            return False
        return all(vb(coms[i], b, o) for i, b, o in zip(idx, expected, view.openings))

    def simulate(self, statement, e: BitVector, rng):
        c, y = statement
        m_end, t_end, v_end = self._segments(c)
        reps, views = [], []
        for i in range(len(e)):
            if e[i] == 0:
                mbits, lam, table = self._garble(c, rng)
                out_masks = [lam[o] for o in c.outputs]
                bits = mbits + table + [0] * c.n_inputs
                coms, opens = self._commit(bits, rng)
                views.append(self._open(c, bits, opens, 0, None))
            else:
                masked_in = rng.bitvector(c.n_inputs).to_list() if c.n_inputs else []
                fresh = rng.bitvector(c.and_count).to_list() if c.and_count else []
                vals, used = self._evaluate_masked(c, masked_in, lambda k, ix: fresh[k])
                table = [0] * (4 * c.and_count)
                for k, ix in enumerate(used):
                    table[4 * k + ix] = fresh[k]
                out_masks = [vals[o] ^ yb for o, yb in zip(c.outputs, y.to_list())]
                bits = [0] * m_end + table + masked_in
                coms, opens = self._commit(bits, rng)
                views.append(self._open(c, bits, opens, 1, masked_in))
            reps.append(GarbledRep(coms, BitVector.from_bits(out_masks)))
        return tuple(reps), tuple(views)

    def extract(self, statement, a, e1, z1, e2, z2) -> BitVector:
        c, y = statement
        j = _differing_coordinate(e1, e2)
        g, ev = (z1[j], z2[j]) if e1[j] == 0 else (z2[j], z1[j])
        if not (isinstance(g, GarblerView) and isinstance(ev, EvaluatorView)):
            raise InvalidArgument("responses do not match their challenge bits")
        return ev.masked_inputs ^ g.masks[:c.n_inputs]

    # encodings --------------------------------------------------------------------------
    def encode_first(self, a) -> bytes:
        w = Writer().u16(len(a))
        for rep in a:
            w.bits(rep.out_masks).u32(len(rep.coms))
            for com in rep.coms:
                w.blob(com.encode())
        return w.getvalue()

    def decode_first(self, data: bytes):
        r = Reader(data)
        reps = []
        for _ in range(r.u16()):
            out_masks = r.bits()
            count = r.u32()
            if count > r.remaining:
                raise DecodeError("commitment count exceeds input")
            reps.append(GarbledRep(tuple(Commitment.decode(r.blob()) for _ in range(count)), out_masks))
        r.done()
        return tuple(reps)

    def encode_response(self, z) -> bytes:
        w = Writer().u16(len(z))
        for v in z:
            if isinstance(v, GarblerView):
                w.u8(0).bits(v.masks)
            else:
                w.u8(1).bits(v.masked_inputs).bits(v.rows)
            w.u32(len(v.openings))
            for o in v.openings:
                w.blob(o.bytes)
        return w.getvalue()

    def decode_response(self, data: bytes):
        r = Reader(data)
        out = []
        for _ in range(r.u16()):
            kind = r.u8()
            if kind == 0:
                masks = r.bits()
                out.append(GarblerView(masks, _openings(r)))
            elif kind == 1:
                mi, rows = r.bits(), r.bits()
                out.append(EvaluatorView(mi, rows, _openings(r)))
            else:
                raise DecodeError("unknown view kind")
        r.done()
        return tuple(out)


def _openings(r: Reader) -> tuple[Opening, ...]:
    count = r.u32()
    if count > r.remaining:
        raise DecodeError("opening count exceeds input")
    return tuple(Opening(r.blob()) for _ in range(count))
