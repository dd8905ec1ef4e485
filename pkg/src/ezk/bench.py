"""Message-count, byte and timing benchmarks for complete protocol runs."""

from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from . import commitments as cm
from .commitments import SchemeId
from .primitives.rng import DeterministicRng
from .protocol import ProtocolConfig, ProverSession, Verdict, VerifierSession, run_local
from .protocol.config import PROOF
from .sigma import CommitContext, instance_gen

DEFAULT_RUNS = 10


class _Timed:
    """Session wrapper charging each handler's wall time to the messages it emits."""

    def __init__(self, inner, role: str, phases: dict):
        self.inner = inner
        self.role = role
        self.phases = phases

    @property
    def finished(self) -> bool:
        return self.inner.finished

    def _timed(self, fn, *args):
        t0 = time.perf_counter()
        out = fn(*args)
        dt = time.perf_counter() - t0
        label = "+".join(m.msg_type.name for m in out) or "finish"
        self.phases[f"{self.role}:{label}"] += dt
        return out

    def start(self):
        return self._timed(self.inner.start)

    def handle(self, m):
        return self._timed(self.inner.handle, m)


@dataclass
class BenchReport:
    mode: str
    n: int
    lam: int
    lam_reps: int
    runs: int
    messages: int
    bytes_mean: float
    bytes_per_type: dict
    seconds_total: float
    seconds_per_phase: dict
    accepted: int

    def to_json(self) -> dict:
        return {"mode": self.mode, "n": self.n, "lambda": self.lam, "lam_reps": self.lam_reps,
                "runs": self.runs, "messages": self.messages, "bytes_mean": self.bytes_mean,
                "bytes_per_type": self.bytes_per_type, "seconds_total": self.seconds_total,
                "seconds_per_phase": self.seconds_per_phase, "accepted": self.accepted}


def bench_run(cfg: ProtocolConfig, n: int = 5, runs: int = DEFAULT_RUNS, seed: int = 0) -> BenchReport:
    root = DeterministicRng(seed)
    x, w = instance_gen(n, 0.3, True, root.fork("instance"))
    phases: dict[str, float] = defaultdict(float)
    per_type: dict[str, int] = defaultdict(int)
    counts = set()
    total_bytes = 0
    accepted = 0
    t0 = time.perf_counter()
    for i in range(runs):
        rr = root.fork(f"run-{i}")
        P = _Timed(ProverSession(x, w, cfg, rr.fork("prover")), "prover", phases)
        V = VerifierSession(x, cfg, rr.fork("verifier"))
        log = run_local(P, _Timed(V, "verifier", phases))
        counts.add(len(log))
        for m in log:
            size = len(m.frame())
            total_bytes += size
            per_type[m.msg_type.name] += size
        accepted += V.verdict is Verdict.ACCEPT
    elapsed = time.perf_counter() - t0
    if len(counts) != 1:
        raise AssertionError(f"message count varied across runs: {sorted(counts)}")
    return BenchReport(cfg.mode, n, cfg.lam, cfg.lam_reps, runs, counts.pop(),
                       total_bytes / runs, {k: v / runs for k, v in sorted(per_type.items())},
                       elapsed, {k: v / runs for k, v in sorted(phases.items())}, accepted)


# --- byte scaling ------------------------------------------------------------------------------

def item_sizes(cfg: ProtocolConfig, seed: int = 0) -> tuple[int, int]:
    """Encoded bytes of one bit commitment and one opening inside the Sigma messages."""
    rng = DeterministicRng(seed)
    pp = cm.setup(SchemeId.NAOR, cfg.lam, rng, prg_mode=cfg.sigma_prg)
    com, opening = CommitContext(pp).commit_bit(1, rng)
    return 4 + len(com.encode()), 4 + len(opening.bytes)


def predicted_slope(cfg: ProtocolConfig) -> float:
    """Bytes per unit of ``lam_reps * n^2`` for the proof.

    Each repetition commits every adjacency cell; a uniform challenge bit
    opens all cells half the time and only ``n`` of them otherwise.
    """
    s_com, s_open = item_sizes(cfg)
    return s_com + s_open / 2


@dataclass
class ScalingReport:
    points: list[tuple[int, int, float]]
    measured_slope: float
    predicted_slope: float

    @property
    def relative_error(self) -> float:
        return abs(self.measured_slope - self.predicted_slope) / self.predicted_slope


def byte_scaling(ns=(4, 6, 8, 10), reps=(2, 4, 8), runs: int = DEFAULT_RUNS, lam: int = 16,
                 seed: int = 0) -> ScalingReport:
    """Least-squares fit ``bytes ~ a reps n^2 + b reps n + c reps + d`` over a grid."""
    points = []
    for n in ns:
        for k in reps:
            cfg = ProtocolConfig(mode=PROOF, lam=lam, lam_reps=k)
            points.append((n, k, bench_run(cfg, n, runs, seed).bytes_mean))
    A = np.array([[k * n * n, k * n, k, 1.0] for n, k, _ in points])
    y = np.array([b for _, _, b in points])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    cfg = ProtocolConfig(mode=PROOF, lam=lam)
    return ScalingReport(points, float(coef[0]), predicted_slope(cfg))
