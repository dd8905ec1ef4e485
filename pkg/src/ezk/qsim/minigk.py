"""Miniature black-box simulation of a commit-challenge verifier.

Interaction (prover P, malicious verifier V*):

1. V* applies ``U_com`` to ``ST (x) C`` and sends the measured ``com``.
2. P sends a uniform ``a``.
3. V* applies ``U_open[a]`` to ``ST (x) M (x) R`` and sends the measured
   ``(e, r)``.
4. If ``(e, r)`` opens ``com`` P answers ``z = a xor e``, otherwise it aborts.

The prover side is the pad protocol (``z = a xor e``), so simulating a
transcript for a known challenge is exact and no witness is involved.  The
verifier's output is the transcript together with its ``ST`` state.

Every stage is linear in the initial ``ST`` state, so real and simulated
executions are written as instruments (keyed Kraus operators) and compared
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..commitments.toytable import ToyTable
from ..errors import InvalidArgument, Unsupported
from .amp import amp_rounds_for, DEFAULT_EPS_AMP
from .ensemble import CQEnsemble, ensemble_distance
from .extraction import STAT_BINDING, ExtParams, ext_kraus, opener_layout
from .jordan import MAX_DIM
from .linalg import check_density, check_unitary, dm, random_density, random_unitary
from .oracle import UnitaryOracle
from .watrous import FAIL, Instrument, check_premises, rewind, rewind_td_bound

ABORT = "ABORT"
MAX_CHALLENGE_BITS = 3
P0_COMB = 0.25
Q_COMB = 0.5
DEFAULT_LAMBDA = 256
PROB_SLACK = 0.02


@dataclass(frozen=True, eq=False)
class MiniVerifier:
    """Verifier unitaries; the challenge is the committed message of ``table``."""

    name: str
    table: ToyTable
    rho0: np.ndarray
    com_values: tuple[int, ...]
    u_com: np.ndarray = field(repr=False)
    u_open: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        k = self.table.m_bits
        if not 1 <= k <= MAX_CHALLENGE_BITS:
            raise InvalidArgument(f"challenge length must lie in [1, {MAX_CHALLENGE_BITS}]")
        rho = check_density(self.rho0)
        s = rho.shape[0]
        if len(set(self.com_values)) != len(self.com_values):
            raise InvalidArgument("commitment values must be distinct")
        u_com = check_unitary(self.u_com, atol=1e-9)
        if u_com.shape[0] != s * len(self.com_values):
            raise InvalidArgument("U_com must act on ST (x) C")
        if len(self.u_open) != 1 << k:
            raise InvalidArgument("need one opening unitary per prover message")
        d_open = s * self.table.n_messages * self.table.n_rand
        opens = tuple(check_unitary(u, atol=1e-9) for u in self.u_open)
        if any(u.shape[0] != d_open for u in opens):
            raise InvalidArgument("opening unitaries must act on ST (x) M (x) R")
        if opener_layout(s, self.table, 1 << k, 1 << k).dim > MAX_DIM:
            raise Unsupported("extraction layout exceeds the size guard")
        object.__setattr__(self, "rho0", rho)
        object.__setattr__(self, "u_com", u_com)
        object.__setattr__(self, "u_open", opens)

    @property
    def k(self) -> int:
        return self.table.m_bits

    @property
    def st_dim(self) -> int:
        return self.rho0.shape[0]

    def com_kraus(self, c: int) -> np.ndarray:
        """``(I (x) <c|) U_com (I (x) |0>)`` on ``ST``."""
        nc = len(self.com_values)
        t = self.u_com.reshape(self.st_dim, nc, self.st_dim, nc)
        return t[:, c, :, 0]

    def open_kraus(self, a: int, e: int, r: int) -> np.ndarray:
        s, dm_, dr = self.st_dim, self.table.n_messages, self.table.n_rand
        t = self.u_open[a].reshape(s, dm_, dr, s, dm_, dr)
        return t[:, e, r, :, 0, 0]

    def valid(self, c: int, e: int, r: int) -> bool:
        return self.table.lookup(e, r) == self.com_values[c]

    def opener_oracle(self) -> tuple[UnitaryOracle, object]:
        """Opener used by the extractor: ``a`` in uniform superposition on ``W``,
        copied to ``Out``, then ``U_open[a]`` controlled on ``W``."""
        s, k = self.st_dim, self.k
        na, dm_, dr = 1 << k, self.table.n_messages, self.table.n_rand
        lay = opener_layout(s, self.table, na, na)
        h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
        hk = np.ones((1, 1))
        for _ in range(k):
            hk = np.kron(hk, h)
        opens = self.u_open

        def fwd(v):
            n = v.shape[1]
            t = v.reshape(s, na, dm_, dr, na, n)
            t = np.einsum("wx,sxmron->swmron", hk, t)
            t = _xor_copy(t)
            return _controlled(t, opens, False).reshape(lay.dim, n)

        def adj(v):
            n = v.shape[1]
            t = v.reshape(s, na, dm_, dr, na, n)
            t = _controlled(t, opens, True)
            t = _xor_copy(t)
            t = np.einsum("wx,sxmron->swmron", hk, t)
            return t.reshape(lay.dim, n)

        return UnitaryOracle.structured(lay.dim, fwd, adj), lay


def _xor_copy(t: np.ndarray) -> np.ndarray:
    na = t.shape[1]
    out = np.empty_like(t)
    for w in range(na):
        for o in range(na):
            out[:, w, :, :, o ^ w] = t[:, w, :, :, o]
    return out


def _controlled(t: np.ndarray, opens, adjoint: bool) -> np.ndarray:
    s, na, dm_, dr, no, n = t.shape
    out = np.empty_like(t)
    for a in range(na):
        u = opens[a].conj().T if adjoint else opens[a]
        block = t[:, a].reshape(s * dm_ * dr, no * n)
        out[:, a] = (u @ block).reshape(s, dm_, dr, no, n)
    return out


# --- executions ------------------------------------------------------------------------------

def _real_ops(v: MiniVerifier, weight: float = 1.0):
    """Kraus operators of the real interaction, split by abort."""
    na = 1 << v.k
    scale = math.sqrt(weight / na)
    keep, abort = {}, {}
    for c in range(len(v.com_values)):
        kc = v.com_kraus(c)
        for a in range(na):
            for e in range(v.table.n_messages):
                for r in range(v.table.n_rand):
                    op = scale * v.open_kraus(a, e, r) @ kc
                    if v.valid(c, e, r):
                        keep[(c, a, e, r, a ^ e)] = [op]
                    else:
                        abort[(c, a, e, r, ABORT)] = [op]
    return keep, abort


def real_instrument(v: MiniVerifier) -> Instrument:
    keep, abort = _real_ops(v)
    return Instrument(v.st_dim, {**keep, **abort})


def mini_gk_real(v: MiniVerifier, rho=None) -> CQEnsemble:
    """Exact output ensemble (transcript key, ``ST`` state) of the honest interaction."""
    return real_instrument(v).apply(0, v.rho0 if rho is None else rho)


def sim_abort_instrument(v: MiniVerifier, weight: float = 1.0) -> Instrument:
    """Guess "abort": replay the real interaction; a valid opening means failure."""
    keep, abort = _real_ops(v, weight)
    return Instrument(v.st_dim, abort, {FAIL: [op for ops in keep.values() for op in ops]})


def sim_nonabort_instrument(v: MiniVerifier, delta: float, weight: float = 1.0,
                            eps_amp: float = DEFAULT_EPS_AMP) -> Instrument:
    """Guess "no abort": extract the challenge, then answer a fresh ``a``.

    Failure covers extractor failure and any final opening that is invalid or
    opens to a different challenge; it is left implicit (``I - E0``).
    """
    params = ExtParams.make(delta, STAT_BINDING, eps_amp, min_delta=0.0)
    oracle, lay = v.opener_oracle()
    na = 1 << v.k
    scale = math.sqrt(weight / na)
    succ: dict = {}
    for c, com in enumerate(v.com_values):
        kraus = ext_kraus(v.table, com, oracle, lay, params)
        if not kraus:
            continue
        kc = v.com_kraus(c)
        for e, K in kraus.items():
            pre = K @ kc
            for a in range(na):
                for r in range(v.table.n_rand):
                    if v.valid(c, e, r):
                        succ[(c, a, e, r, a ^ e)] = [scale * v.open_kraus(a, e, r) @ pre]
    inst = Instrument(v.st_dim, succ)
    return inst.with_scalar_failure()


def sim_comb_instrument(v: MiniVerifier, delta: float, eps_amp: float = DEFAULT_EPS_AMP) -> Instrument:
    a = sim_abort_instrument(v, 0.5)
    na = sim_nonabort_instrument(v, delta, 0.5, eps_amp)
    overlap = set(a.success) & set(na.success)
    if overlap:
        raise AssertionError("abort and non-abort transcripts must be disjoint")
    return Instrument(v.st_dim, {**a.success, **na.success}).with_scalar_failure()


# --- parameter schedule ---------------------------------------------------------------------

@dataclass(frozen=True)
class SimSchedule:
    epsilon: float
    lam: int
    delta: float
    t: float
    T_amp: int
    T_rewind: int
    rewind_bound: float
    budget: float
    eps_amp: float

    def to_json(self) -> dict:
        return {"epsilon": self.epsilon, "lambda": self.lam, "delta": self.delta, "t": self.t,
                "T_amp": self.T_amp, "T_rewind": self.T_rewind,
                "rewind_bound": self.rewind_bound, "budget": self.budget, "eps_amp": self.eps_amp}


def sim_error_budget(epsilon: float, lam: int = DEFAULT_LAMBDA) -> SimSchedule:
    """``delta = eps^2 / (3600 log2^4 lam)``, ``T_rewind = 2 log2(1/delta)``, budget ``eps/2 + 4 delta``."""
    if not 0 < epsilon < 1:
        raise InvalidArgument("epsilon must lie in (0, 1)")
    if lam < 3:
        raise InvalidArgument("lambda must be at least 3")
    delta = epsilon ** 2 / (3600 * math.log2(lam) ** 4)
    if not delta < epsilon / 8:
        raise AssertionError("schedule violates delta < epsilon / 8")
    t = delta ** 3 / 64
    eps_amp = min(DEFAULT_EPS_AMP, delta / 16)
    T_amp = amp_rounds_for(t, eps_amp)
    T_rewind = math.ceil(2 * math.log2(1 / delta))
    budget = epsilon / 2 + 4 * delta
    if not budget < epsilon:
        raise AssertionError("schedule violates eps/2 + 4 delta < eps")
    return SimSchedule(epsilon, lam, delta, t, T_amp, T_rewind,
                       rewind_td_bound(delta, P0_COMB), budget, eps_amp)


@dataclass
class SimulationResult:
    fixture: str
    real: CQEnsemble
    sim: CQEnsemble
    td: float
    p_comb: float
    p_comb_range: tuple[float, float]
    premises_ok: bool
    schedule: SimSchedule

    @property
    def prob_gap(self) -> float:
        return abs(self.p_comb - 0.5)

    @property
    def prob_tolerance(self) -> float:
        return self.schedule.delta / 2 + PROB_SLACK


def mini_gk_sim(v: MiniVerifier, epsilon: float, lam: int = DEFAULT_LAMBDA, rho=None) -> CQEnsemble:
    """Exact output ensemble of the rewound combined simulator (includes a FAIL key)."""
    sched = sim_error_budget(epsilon, lam)
    inst = sim_comb_instrument(v, sched.delta, sched.eps_amp)
    return rewind(inst, sched.T_rewind, v.rho0 if rho is None else rho)


def simulate(v: MiniVerifier, epsilon: float, lam: int = DEFAULT_LAMBDA, rho=None) -> SimulationResult:
    sched = sim_error_budget(epsilon, lam)
    rho = v.rho0 if rho is None else check_density(rho)
    inst = sim_comb_instrument(v, sched.delta, sched.eps_amp)
    sim = rewind(inst, sched.T_rewind, rho)
    real = mini_gk_real(v, rho)
    prem = check_premises(inst, P0_COMB, Q_COMB, sched.delta, sched.T_rewind)
    return SimulationResult(v.name, real, sim, ensemble_distance(real, sim),
                            inst.success_probability(rho), (prem.p_min, prem.p_max), prem.ok, sched)


# --- fixture library --------------------------------------------------------------------------

def strict_table(k: int, r_bits: int) -> ToyTable:
    return ToyTable(k, r_bits, tuple(range((1 << k) << r_bits)))


def _perm(dim: int, mapping) -> np.ndarray:
    p = np.zeros((dim, dim), dtype=complex)
    for src in range(dim):
        p[mapping(src), src] = 1
    return p


def _uniform(dim: int) -> np.ndarray:
    return np.full(dim, 1 / math.sqrt(dim), dtype=complex)


def _copy_opening(table: ToyTable, st_dims: tuple[int, ...], pick, name: str, rho0, com_values=None,
                  pre=None) -> MiniVerifier:
    """Verifier whose ``ST`` starts with registers ``(E, R, *extra)``.

    ``U_com`` XORs the commitment index of ``(e, r)`` into ``C``;
    ``U_open[a]`` XORs ``pick(a, e, r, extra)`` into ``(M, R)`` after the
    optional per-``a`` unitary ``pre(a)`` on ``ST``.
    """
    ne, nr = table.n_messages, table.n_rand
    s = int(np.prod(st_dims))
    com_values = tuple(com_values or sorted(table.values()))
    index = {c: i for i, c in enumerate(com_values)}
    nc = len(com_values)

    def com_map(i):
        st, c = divmod(i, nc)
        e, rest = divmod(st, s // ne)
        r = rest // (s // ne // nr)
        return st * nc + (c ^ index[table.lookup(e, r)]) % nc if (c ^ index[table.lookup(e, r)]) < nc else i

    if nc & (nc - 1):
        raise InvalidArgument("number of commitment values must be a power of two")
    u_com = _perm(s * nc, com_map)
    opens = []
    dmr = ne * nr
    for a in range(1 << table.m_bits):
        def open_map(i, a=a):
            st, mr = divmod(i, dmr)
            e, rest = divmod(st, s // ne)
            r, extra = divmod(rest, s // ne // nr)
            pe, pr = pick(a, e, r, extra)
            return st * dmr + (mr ^ (pe * nr + pr))
        u = _perm(s * dmr, open_map)
        if pre is not None:
            u = u @ np.kron(pre(a), np.eye(dmr))
        opens.append(u)
    return MiniVerifier(name, table, rho0, com_values, u_com, tuple(opens))


def honest_verifier(k: int = 1, r_bits: int = 1) -> MiniVerifier:
    """Commits to a uniformly superposed ``(e, r)`` and always opens it."""
    table = strict_table(k, r_bits)
    s = table.n_messages * table.n_rand
    return _copy_opening(table, (table.n_messages, table.n_rand), lambda a, e, r, x: (e, r),
                         "honest-opening", dm(_uniform(s)))


def superposition_abort_verifier(k: int = 1, r_bits: int = 1) -> MiniVerifier:
    """Flag qubit in ``|+>``: flag 1 opens honestly, flag 0 sends ``(e xor 1, r)``."""
    table = strict_table(k, r_bits)
    s = table.n_messages * table.n_rand * 2
    return _copy_opening(table, (table.n_messages, table.n_rand, 2),
                         lambda a, e, r, f: (e, r) if f else (e ^ 1, r),
                         "superposition-abort", dm(_uniform(s)))


def a_dependent_verifier(k: int = 1, r_bits: int = 1, seed: int = 0) -> MiniVerifier:
    """Like the superposition fixture, but the flag is first rotated by an ``a``-dependent angle."""
    table = strict_table(k, r_bits)
    gen = np.random.default_rng(seed)
    angles = gen.uniform(0, math.pi, 1 << k)
    ner = table.n_messages * table.n_rand
    s = ner * 2

    def pre(a):
        c, sn = math.cos(angles[a] / 2), math.sin(angles[a] / 2)
        return np.kron(np.eye(ner), np.array([[c, -sn], [sn, c]]))

    return _copy_opening(table, (table.n_messages, table.n_rand, 2),
                         lambda a, e, r, f: (e, r) if f else (e ^ 1, r),
                         "a-dependent", dm(_uniform(s)), pre=pre)


def always_abort_verifier(k: int = 1, r_bits: int = 1, seed: int = 0) -> MiniVerifier:
    """Commits honestly but always opens to an invalid pair, scrambling ``ST`` by ``a``."""
    table = strict_table(k, r_bits)
    gen = np.random.default_rng(seed)
    s = table.n_messages * table.n_rand
    rots = [random_unitary(s, gen) for _ in range(1 << k)]
    # permutations keep the (e, r) basis, so the opened pair stays invalid
    return _copy_opening(table, (table.n_messages, table.n_rand), lambda a, e, r, x: (e ^ 1, r),
                         "always-abort", random_density(s, gen), pre=lambda a: _diag_phase(rots[a]))


def _diag_phase(u: np.ndarray) -> np.ndarray:
    # phases only: entangles nothing but makes ST depend on a
    return np.diag(np.exp(1j * np.angle(np.diag(u))))


def random_verifier(seed: int, k: int = 1, r_bits: int = 1, st_dim: int = 2) -> MiniVerifier:
    gen = np.random.default_rng(seed)
    table = strict_table(k, r_bits)
    com_values = tuple(sorted(table.values()))
    d_com = st_dim * len(com_values)
    d_open = st_dim * table.n_messages * table.n_rand
    return MiniVerifier(f"random-{seed}", table, random_density(st_dim, gen), com_values,
                        random_unitary(d_com, gen),
                        tuple(random_unitary(d_open, gen) for _ in range(1 << k)))


def fixture_suite() -> list[MiniVerifier]:
    return [always_abort_verifier(), honest_verifier(), superposition_abort_verifier(),
            a_dependent_verifier(), honest_verifier(2, 0), a_dependent_verifier(2, 0, seed=1),
            random_verifier(0), random_verifier(1), random_verifier(2, st_dim=3)]
