"""The four-message WIPoK for the OR language and its knowledge extractor.

Message order: verifier sends Naor parameters for the proof's commitments,
prover sends the composed first message, verifier sends a challenge, prover
sends the composed response.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

from .. import commitments as cm
from ..circuits import build_commit_relation_circuit, relation_target, relation_witness
from ..commitments import Commitment, Opening, PublicParam, SchemeId
from ..encoding import Reader, Writer
from ..errors import DecodeError, InvalidArgument
from ..primitives.bits import BitVector
from ..primitives.prg import XOF_MODE
from ..primitives.rng import DeterministicRng
from ..sigma import CommitContext, CycleWitness, GraphInstance
from .branch import BlumBranch, CircuitPoKBranch
from .compose import BRANCH_A, BRANCH_B, OrProtocol, OrWitness


@dataclass(frozen=True)
class OrStatement:
    """``(pp_sigma, x, coms)``: either ``x`` is Hamiltonian or every ``coms[i]``
    opens under ``pp_sigma`` (one committed bit each)."""

    pp_sigma: PublicParam
    x: GraphInstance
    coms: tuple[Commitment, ...]

    @cached_property
    def circuit(self):
        return build_commit_relation_circuit(self.pp_sigma, 1, len(self.coms))

    @cached_property
    def target(self) -> BitVector:
        return relation_target(self.pp_sigma, self.coms)

    def branch_statements(self):
        return self.x, (self.circuit, self.target)


def openings_witness(st: OrStatement, bits: Sequence[int], openings: Sequence[Opening]) -> OrWitness:
    """Branch-B witness from the committed bits and their openings."""
    msgs = [BitVector(b, 1) for b in bits]
    return OrWitness(BRANCH_B, relation_witness(st.pp_sigma, msgs, openings))


def cycle_witness(w: CycleWitness) -> OrWitness:
    return OrWitness(BRANCH_A, w)


@dataclass(frozen=True)
class WipokConfig:
    k_reps: int = 4
    lam: int = 16
    prg_mode: str = XOF_MODE


def make_protocol(pp_w: PublicParam, k_reps: int) -> OrProtocol:
    ctx = CommitContext(pp_w)
    return OrProtocol(BlumBranch(ctx, k_reps), CircuitPoKBranch(ctx, k_reps))


def _encode_challenge(e: BitVector) -> bytes:
    return Writer().bits(e).getvalue()


def _decode_challenge(data: bytes) -> BitVector:
    r = Reader(data)
    e = r.bits()
    r.done()
    return e


class WipokVerifier:
    def __init__(self, statement: OrStatement, cfg: WipokConfig, rng):
        self.statement = statement
        self.cfg = cfg
        self.rng = rng
        self.pp_w = cm.setup(SchemeId.NAOR, cfg.lam, rng, prg_mode=cfg.prg_mode)
        self.proto = make_protocol(self.pp_w, cfg.k_reps)
        self.a = None
        self.e: BitVector | None = None

    def params_message(self) -> bytes:
        return self.pp_w.encode()

    def receive_first(self, data: bytes) -> bytes:
        self.a = self.proto.decode_first(data)
        self.e = self.rng.bitvector(self.cfg.k_reps)
        return _encode_challenge(self.e)

    def receive_response(self, data: bytes) -> bool:
        try:
            z = self.proto.decode_response(data)
        except (DecodeError, InvalidArgument):
            return False
        return self.proto.verify(self.statement.branch_statements(), self.a, self.e, z)


class WipokProver:
    def __init__(self, statement: OrStatement, witness: OrWitness, cfg: WipokConfig, rng):
        self.statement = statement
        self.witness = witness
        self.cfg = cfg
        self.rng = rng
        self.proto: OrProtocol | None = None
        self.st = None

    def receive_params(self, data: bytes) -> bytes:
        pp_w = PublicParam.decode(data)
        if pp_w.scheme is not SchemeId.NAOR:
            raise DecodeError("WIPoK parameters must be Naor parameters")
        self.proto = make_protocol(pp_w, self.cfg.k_reps)
        a, self.st = self.proto.first(self.statement.branch_statements(), self.witness, self.rng)
        return self.proto.encode_first(a)

    def receive_challenge(self, data: bytes) -> bytes:
        e = _decode_challenge(data)
        z = self.proto.respond(self.st, self.witness, e)
        return self.proto.encode_response(z)


def wipok_run(prover_witness: OrWitness, statement: OrStatement, cfg: WipokConfig,
              prover_rng, verifier_rng,
              tamper: Callable[[int, bytes], bytes] | None = None) -> tuple[bool, list[bytes]]:
    """Run prover and verifier in process; returns the verdict and the four messages.

    ``tamper(index, payload)`` may rewrite any message in flight.
    """
    tamper = tamper or (lambda i, m: m)
    V = WipokVerifier(statement, cfg, verifier_rng)
    P = WipokProver(statement, prover_witness, cfg, prover_rng)
    msgs = []
    m1 = tamper(0, V.params_message())
    msgs.append(m1)
    m2 = tamper(1, P.receive_params(m1))
    msgs.append(m2)
    m3 = tamper(2, V.receive_first(m2))
    msgs.append(m3)
    m4 = tamper(3, P.receive_challenge(m3))
    msgs.append(m4)
    return V.receive_response(m4), msgs


# --- knowledge extraction --------------------------------------------------------------

class ResettableProver:
    """Deterministic classical prover that can be rewound to its start.

    ``answers(e)`` decides whether the prover replies to challenge ``e``;
    otherwise it behaves honestly with the given witness.  A rewound prover
    replays identically, so its first message is computed once per parameter
    string.
    """

    def __init__(self, statement: OrStatement, witness: OrWitness | None, cfg: WipokConfig,
                 seed: int, answers: Callable[[BitVector], bool] | None = None):
        self.statement = statement
        self.witness = witness
        self.cfg = cfg
        self.seed = seed
        self.answers = answers or (lambda e: True)
        self._cache: tuple[bytes, WipokProver, bytes] | None = None
        self._started = False

    def reset(self) -> None:
        self._started = False

    def first(self, pp_bytes: bytes) -> bytes | None:
        if self.witness is None:
            return None
        if self._cache is None or self._cache[0] != pp_bytes:
            inner = WipokProver(self.statement, self.witness, self.cfg, DeterministicRng(self.seed))
            self._cache = (pp_bytes, inner, inner.receive_params(pp_bytes))
        self._started = True
        return self._cache[2]

    def respond(self, e: BitVector) -> bytes | None:
        if not self._started or not self.answers(e):
            return None
        return self._cache[1].receive_challenge(_encode_challenge(e))


@dataclass
class ExtractionResult:
    witness: OrWitness | None
    queries: int
    accepting: int


def extract_knowledge(prover_oracle: ResettableProver, statement: OrStatement, trials: int,
                      rng, cfg: WipokConfig | None = None) -> ExtractionResult:
    """Rewind the prover with fresh challenges until two distinct ones are answered."""
    cfg = cfg or prover_oracle.cfg
    pp_w = cm.setup(SchemeId.NAOR, cfg.lam, rng, prg_mode=cfg.prg_mode)
    proto = make_protocol(pp_w, cfg.k_reps)
    stmts = statement.branch_statements()
    found: dict[int, tuple[BitVector, object]] = {}
    raw_first = a = None
    accepting = 0
    for q in range(trials):
        prover_oracle.reset()
        raw_a = prover_oracle.first(pp_w.encode())
        if raw_a is None:
            return ExtractionResult(None, q + 1, accepting)
        if raw_first is None:
            try:
                a = proto.decode_first(raw_a)
            except DecodeError:
                return ExtractionResult(None, q + 1, accepting)
            raw_first = raw_a
        elif raw_a != raw_first:
            # a rewound prover must repeat its first message
            return ExtractionResult(None, q + 1, accepting)
        e = rng.bitvector(cfg.k_reps)
        raw_z = prover_oracle.respond(e)
        if raw_z is None:
            continue
        try:
            z = proto.decode_response(raw_z)
        except DecodeError:
            continue
        if not proto.verify(stmts, a, e, z):
            continue
        accepting += 1
        found.setdefault(e.value, (e, z))
        if len(found) >= 2:
            (e1, z1), (e2, z2) = list(found.values())[:2]
            w = proto.extract(stmts, a, e1, z1, e2, z2)
            return ExtractionResult(w, q + 1, accepting)
    return ExtractionResult(None, trials, accepting)


def witness_is_valid(statement: OrStatement, w: OrWitness) -> bool:
    if w.branch == BRANCH_A:
        return isinstance(w.value, CycleWitness) and w.value.is_valid_for(statement.x)
    from ..circuits import eval_circuit
    return eval_circuit(statement.circuit, w.value) == statement.target


@dataclass
class ExponentReport:
    acceptance: list[float]
    success: list[float]
    exponent: float
    runs: int
    trials: int


def measure_extraction_exponent(statement: OrStatement, witness: OrWitness, cfg: WipokConfig,
                                set_sizes: Sequence[int], runs: int, trials: int,
                                seed: int = 0) -> ExponentReport:
    """Fit ``success ~ acceptance^d`` for provers answering a fixed challenge subset.

    A prover answering ``s`` of the ``2^k`` challenges is accepted with
    probability ``s / 2^k``; the extractor is given ``trials`` rewinds.  The
    slope of ``log success`` against ``log acceptance`` is the reported ``d``.
    """
    rng = DeterministicRng(seed)
    space = 1 << cfg.k_reps
    acc, succ = [], []
    for s in set_sizes:
        if not 1 <= s <= space:
            raise InvalidArgument("subset size out of range")
        hits = 0
        for run in range(runs):
            subset = set(rng.permutation(space)[:s])
            prover = ResettableProver(statement, witness, cfg, seed=rng.randbits(32),
                                      answers=lambda e, S=subset: e.value in S)
            res = extract_knowledge(prover, statement, trials, rng, cfg)
            if res.witness is not None and witness_is_valid(statement, res.witness):
                hits += 1
        acc.append(s / space)
        succ.append(hits / runs)
    pts = [(math.log(p), math.log(q)) for p, q in zip(acc, succ) if q > 0 and p < 1]
    if len(pts) >= 2:
        mx = sum(x for x, _ in pts) / len(pts)
        my = sum(y for _, y in pts) / len(pts)
        num = sum((x - mx) * (y - my) for x, y in pts)
        den = sum((x - mx) ** 2 for x, _ in pts)
        d = num / den if den else float("nan")
    else:
        d = float("nan")
    return ExponentReport(acc, succ, d, runs, trials)
