"""Rewinding a procedure whose success probability barely depends on its input.

A procedure is described as an instrument on the input space: for each
success output key a list of Kraus operators ``input -> output``, and the same
for failure.  The rewinding procedure repeats: run, measure the success bit,
and on failure undo the run, reflect about the all-zero ancilla and run again.
Its total effect on the input has a closed form in terms of the failure
effect ``E1``:

    D(rho) = sum_{k=1}^{T} Phi0(G_k rho G_k^dag) + Phi1(F rho F^dag)
    G_1 = I,  G_k = 2 E1 (2 E1 - I)^{k-2},  F = (2 E1 - I)^{T-1}

which is what :func:`rewind` evaluates.  :func:`rewind_explicit` runs the
loop itself against a unitary oracle and serves as the cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from ..errors import InvalidArgument, Unsupported
from .ensemble import CQEnsemble, ensemble_distance
from .layout import RegisterLayout
from .linalg import as_matrix, check_density, random_density, random_unitary
from .oracle import UnitaryOracle

SIZE_GUARD = 1 << 12
FAIL = "FAIL"


def rewind_td_bound(gamma: float, p0: float) -> float:
    """``4 sqrt(gamma) log2(1/gamma) / (p0 (1 - p0))``."""
    if not 0 < gamma < 0.5:
        raise InvalidArgument("gamma must lie in (0, 1/2)")
    if not 0 < p0 < 1:
        raise InvalidArgument("p0 must lie in (0, 1)")
    return 4 * math.sqrt(gamma) * math.log2(1 / gamma) / (p0 * (1 - p0))


def rewind_rounds(gamma: float, p0: float) -> int:
    """Least ``T`` with ``T >= log2(1/gamma) / (4 p0 (1 - p0))``."""
    if not 0 < gamma < 0.5 or not 0 < p0 < 1:
        raise InvalidArgument("need gamma in (0, 1/2) and p0 in (0, 1)")
    return max(1, math.ceil(math.log2(1 / gamma) / (4 * p0 * (1 - p0)) - 1e-12))


@dataclass
class Instrument:
    """Two-outcome instrument with keyed outputs.

    ``success[key]`` and ``failure[key]`` are lists of Kraus operators mapping
    the input space to that key's output space.
    """

    dim_in: int
    success: dict[Hashable, list[np.ndarray]]
    failure: dict[Hashable, list[np.ndarray]] = field(default_factory=dict)

    def effect(self, branch: int) -> np.ndarray:
        ops = self.success if branch == 0 else self.failure
        e = np.zeros((self.dim_in, self.dim_in), dtype=complex)
        for lst in ops.values():
            for k in lst:
                e += k.conj().T @ k
        return (e + e.conj().T) / 2

    def check_complete(self, atol: float = 1e-8) -> float:
        err = float(np.abs(self.effect(0) + self.effect(1) - np.eye(self.dim_in)).max())
        if err > atol:
            raise InvalidArgument(f"instrument is not trace preserving (error {err:.2e})")
        return err

    def apply(self, branch: int, rho) -> CQEnsemble:
        ops = self.success if branch == 0 else self.failure
        rho = as_matrix(rho)
        out = CQEnsemble()
        for key, lst in ops.items():
            acc = None
            for k in lst:
                term = k @ rho @ k.conj().T
                acc = term if acc is None else acc + term
            if acc is not None:
                out.add(key, acc)
        return out

    def success_probability(self, rho) -> float:
        return float(np.trace(self.effect(0) @ as_matrix(rho)).real)

    def conditional_output(self, rho) -> CQEnsemble:
        """Output conditioned on success."""
        p = self.success_probability(rho)
        if p <= 0:
            raise InvalidArgument("success probability is zero on this input")
        return self.apply(0, rho).scaled(1 / p)

    def with_scalar_failure(self) -> "Instrument":
        """Same success branch; failure replaced by a single classical FAIL flag."""
        e1 = np.eye(self.dim_in) - self.effect(0)
        w, v = np.linalg.eigh((e1 + e1.conj().T) / 2)
        ops = [math.sqrt(max(x, 0.0)) * v[:, i].conj()[None, :] for i, x in enumerate(w) if x > 1e-15]
        return Instrument(self.dim_in, self.success, {FAIL: ops})


def instrument_from_unitary(layout: RegisterLayout, oracle: UnitaryOracle, inp: Sequence[str],
                            b: str, out: Sequence[str]) -> Instrument:
    """Instrument of "prepare zero ancillas, apply Q, measure b, keep ``out``".

    ``inp`` must be the leading registers of ``layout``; success is ``b = 0``.
    """
    names = layout.names
    inp = list(inp)
    if names[:len(inp)] != inp:
        raise InvalidArgument("input registers must lead the layout")
    if layout.dim > SIZE_GUARD:
        raise Unsupported(f"procedure dimension exceeds {SIZE_GUARD}")
    d_in = layout.sub_dim(inp)
    d_anc = layout.dim // d_in
    iso = np.zeros((layout.dim, d_in), dtype=complex)
    iso[np.arange(d_in) * d_anc, np.arange(d_in)] = 1
    cols = oracle.apply(iso)
    rest = [n for n in names if n != b and n not in out]
    order = [b] + rest + list(out)
    t = cols.reshape(layout.dims + [d_in])
    t = np.transpose(t, [names.index(n) for n in order] + [len(names)])
    d_rest = layout.sub_dim(rest) if rest else 1
    d_out = layout.sub_dim(out) if out else 1
    t = t.reshape(2, d_rest, d_out, d_in)
    succ = [t[0, x] for x in range(d_rest)]
    fail = [t[1, x] for x in range(d_rest)]
    return Instrument(d_in, {None: succ}, {None: fail})


def _mat_power_series(e1: np.ndarray, T: int):
    """Yield ``G_1..G_T`` then ``F``."""
    d = e1.shape[0]
    refl = 2 * e1 - np.eye(d)
    yield np.eye(d, dtype=complex)
    g = 2 * e1.astype(complex)
    for _ in range(2, T + 1):
        yield g
        g = g @ refl
    w, v = np.linalg.eigh((refl + refl.conj().T) / 2)
    yield (v * w ** (T - 1)) @ v.conj().T


def rewind(inst: Instrument, T: int, rho) -> CQEnsemble:
    """Exact output of ``T`` rewinding rounds (closed form)."""
    if T < 1:
        raise InvalidArgument("T must be at least 1")
    rho = check_density(rho)
    e1 = inst.effect(1)
    ops = list(_mat_power_series(e1, T))
    gs, f = ops[:-1], ops[-1]
    out = CQEnsemble()
    for g in gs:
        for key, v in inst.apply(0, g @ rho @ g.conj().T).parts.items():
            out.add(key, v)
    for key, v in inst.apply(1, f @ rho @ f.conj().T).parts.items():
        out.add(key, v)
    return out


def rewind_explicit(layout: RegisterLayout, oracle: UnitaryOracle, inp: Sequence[str], b: str,
                    out: Sequence[str], T: int, rho) -> CQEnsemble:
    """Run the rewinding loop on the full density matrix using only oracle calls."""
    if layout.dim > SIZE_GUARD:
        raise Unsupported(f"procedure dimension exceeds {SIZE_GUARD}")
    d_in = layout.sub_dim(inp)
    d_anc = layout.dim // d_in
    anc0 = np.zeros((d_anc, d_anc))
    anc0[0, 0] = 1
    reflect = np.kron(np.eye(d_in), 2 * anc0 - np.eye(d_anc))
    pb = [layout.basis_projector(b, 0), layout.basis_projector(b, 1)]
    state = np.kron(check_density(rho), anc0).astype(complex)

    def conj(u_apply, m):
        return u_apply(u_apply(m).conj().T).conj().T

    result = np.zeros((layout.sub_dim(out),) * 2, dtype=complex)
    for k in range(T):
        state = conj(oracle.apply, state)
        good = pb[0] @ state @ pb[0]
        result += layout.partial_trace(good, out)
        state = pb[1] @ state @ pb[1]
        if k == T - 1:
            result += layout.partial_trace(state, out)
            break
        state = conj(oracle.apply_adjoint, state)
        state = reflect @ state @ reflect
    return CQEnsemble({None: result})


# --- premises ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class PremiseReport:
    p_min: float
    p_max: float
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_premises(inst: Instrument, p0: float, q: float, gamma: float, T: int) -> PremiseReport:
    """Check the four conditions under which the rewinding bound applies.

    Success probabilities range over the spectrum of the success effect, so
    "for every input" reduces to its extreme eigenvalues.
    """
    w = np.linalg.eigvalsh(inst.effect(0))
    lo, hi = float(w.min()), float(w.max())
    bad = []
    if not (0 < p0 < 1 and 0 < q < 1 and 0 < gamma < 0.5):
        bad.append("parameters out of range")
    else:
        if T < math.log2(1 / gamma) / (4 * p0 * (1 - p0)):
            bad.append("T too small")
        if lo < p0:
            bad.append("success probability below p0")
        if max(abs(lo - q), abs(hi - q)) >= gamma:
            bad.append("success probability not within gamma of q")
        if p0 * (1 - p0) > q * (1 - q):
            bad.append("q farther from 1/2 than p0")
    return PremiseReport(lo, hi, tuple(bad))


@dataclass(frozen=True)
class RewindResult:
    td: float
    bound: float | None
    premises: PremiseReport
    T: int

    @property
    def holds(self) -> bool | None:
        if not self.premises.ok:
            return None
        return self.td <= self.bound


def rewind_experiment(inst: Instrument, rho, p0: float, q: float, gamma: float,
                      T: int | None = None) -> RewindResult:
    T = T or rewind_rounds(gamma, p0)
    prem = check_premises(inst, p0, q, gamma, T)
    target = inst.conditional_output(rho)
    got = rewind(inst, T, rho)
    bound = rewind_td_bound(gamma, p0) if prem.ok else None
    return RewindResult(ensemble_distance(target, got), bound, prem, T)


# --- fixtures ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitaryProcedure:
    """Dense fixture: input registers ``Inp``, success bit ``B`` and an output register."""

    layout: RegisterLayout
    u: np.ndarray

    def oracle(self) -> UnitaryOracle:
        return UnitaryOracle(self.u)

    def instrument(self) -> Instrument:
        return instrument_from_unitary(self.layout, self.oracle(), ["Inp"], "B", ["Out"])


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def biased_procedure(success_probs: Sequence[float], out_dim: int, gen: np.random.Generator,
                     *, entangle: bool = True) -> UnitaryProcedure:
    """Succeeds with probability ``success_probs[s]`` on input vector ``s`` of a random frame.

    Layout ``Inp (x) B (x) Out``.  With ``entangle`` the output is produced by a
    random unitary on ``Inp (x) Out`` that depends on the success bit.
    """
    d_in = len(success_probs)
    lay = RegisterLayout([("Inp", d_in), ("B", 2), ("Out", out_dim)])
    frame = random_unitary(d_in, gen)
    rot = np.zeros((2 * d_in, 2 * d_in), dtype=complex)
    for s, p in enumerate(success_probs):
        if not 0 <= p <= 1:
            raise InvalidArgument("success probabilities must lie in [0, 1]")
        theta = 2 * math.acos(math.sqrt(p))
        v = frame[:, s]
        rot += np.kron(np.outer(v, v.conj()), _ry(theta))
    step1 = lay.embed(["Inp", "B"], rot)
    if entangle:
        branch = [random_unitary(d_in * out_dim, gen) for _ in range(2)]
    else:
        branch = [np.eye(d_in * out_dim)] * 2
    ctrl = np.zeros((lay.dim, lay.dim), dtype=complex)
    for bit in (0, 1):
        ctrl += lay.embed(["B"], np.diag([1.0 - bit, float(bit)])) @ lay.embed(["Inp", "Out"], branch[bit])
    return UnitaryProcedure(lay, ctrl @ step1)


def hadamard_procedure(d_in: int, out_dim: int, gen: np.random.Generator) -> UnitaryProcedure:
    """Success bit prepared by a Hadamard: probability exactly 1/2 on every input."""
    return biased_procedure([0.5] * d_in, out_dim, gen)


def random_premise_fixture(gen: np.random.Generator, *, d_in: int = 2, out_dim: int = 2,
                           q: float = 0.5, gamma: float = 1e-6):
    """Procedure with success probabilities strictly within ``gamma`` of ``q``."""
    probs = q + gamma * 0.99 * (2 * gen.random(d_in) - 1)
    return biased_procedure(list(probs), out_dim, gen), random_density(d_in, gen)
