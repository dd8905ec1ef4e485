"""One-call drivers for complete protocol executions."""

from __future__ import annotations

from dataclasses import dataclass

from ..primitives.rng import DeterministicRng
from ..sigma import CycleWitness, GraphInstance
from .config import ProtocolConfig
from .sessions import CYCLE, ProverSession, Verdict, VerifierSession
from .transcript import Transcript
from .transport import run_local


@dataclass
class RunResult:
    verdict: Verdict
    transcript: Transcript
    prover: ProverSession
    verifier: VerifierSession


def run_protocol(x: GraphInstance, w: CycleWitness, cfg: ProtocolConfig, seed: int = 0, *,
                 verifier: VerifierSession | None = None, tamper=None,
                 prover_rng=None, verifier_rng=None, witness_choice: str = CYCLE) -> RunResult:
    """Run an honest prover against ``verifier`` (honest by default).

    Prover and verifier randomness are independent forks of ``seed`` unless
    explicit generators are passed.
    """
    root = DeterministicRng(seed)
    P = ProverSession(x, w, cfg, prover_rng or root.fork("prover"), witness_choice)
    V = verifier or VerifierSession(x, cfg, verifier_rng or root.fork("verifier"))
    log = run_local(P, V, tamper=tamper)
    verdict = V.verdict if V.verdict is not None else Verdict.REJECT
    return RunResult(verdict, Transcript(cfg, x, log, verdict), P, V)
