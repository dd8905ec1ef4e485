"""Committed-message extraction from a quantum opener, computed exactly.

Register layout of the opener: ``ST (x) W (x) M (x) R (x) Out``.  The opener
starts with its state in ``ST`` and zeros elsewhere, applies ``U_open`` and
measures ``M``, ``R`` and ``Out``.

The extractor amplifies the valid-opening projector with ``T`` alternating
rounds, measures the success bit, reads the message (or message and
randomness), uncomputes and post-selects the work registers on zero.  Because
the whole procedure is one coherent sum over measurement histories followed by
post-selection, each extractor outcome ``o`` acts on ``ST`` through a single
Kraus operator.  Those operators are evaluated in closed form below, which is
what makes ``T`` in the tens of thousands affordable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable

import numpy as np

from ..commitments.toytable import ToyTable
from ..errors import InvalidArgument, Unsupported
from .amp import DEFAULT_EPS_AMP, amp_rounds_for
from .ensemble import CQEnsemble, ensemble_distance
from .jordan import MAX_DIM, jordan_decompose
from .layout import RegisterLayout
from .linalg import (check_density, check_projector, check_unitary, dm, random_density,
                     random_unitary)
from .oracle import UnitaryOracle

STRONG_CB = "strong-cb"
STAT_BINDING = "stat-binding"
VARIANTS = (STRONG_CB, STAT_BINDING)
MIN_DELTA = 2.0 ** -10
ZERO_TOL = 1e-12
Y_REGS = ("W", "M", "R", "Out")
BOTTOM = None


def opener_layout(st_dim: int, table: ToyTable, w_dim: int = 1, out_dim: int = 1) -> RegisterLayout:
    return RegisterLayout([("ST", st_dim), ("W", w_dim), ("M", table.n_messages),
                           ("R", table.n_rand), ("Out", out_dim)])


@dataclass(frozen=True, eq=False)
class ToyAdversary:
    """A committed value plus an opening unitary over the opener layout."""

    table: ToyTable
    com: int
    rho_st: np.ndarray
    u_open: np.ndarray = field(repr=False)
    w_dim: int = 1
    out_dim: int = 1

    def __post_init__(self):
        lay = self.layout
        if lay.dim > MAX_DIM:
            raise Unsupported(f"opener dimension {lay.dim} exceeds {MAX_DIM}")
        u = check_unitary(self.u_open)
        if u.shape[0] != lay.dim:
            raise InvalidArgument("U_open does not match the register layout")
        rho = check_density(self.rho_st)
        if rho.shape[0] != lay.dims[0]:
            raise InvalidArgument("ST state has the wrong dimension")
        object.__setattr__(self, "u_open", u)
        object.__setattr__(self, "rho_st", rho)

    @property
    def st_dim(self) -> int:
        return np.asarray(self.rho_st).shape[0]

    @property
    def layout(self) -> RegisterLayout:
        return opener_layout(np.asarray(self.rho_st).shape[0], self.table, self.w_dim, self.out_dim)

    def oracle(self) -> UnitaryOracle:
        return UnitaryOracle(self.u_open, check=False)


def valid_openings(table: ToyTable, com: int) -> list[tuple[int, int]]:
    return table.openings(com)


def test_projector(table: ToyTable, com: int, layout: RegisterLayout) -> np.ndarray:
    """Projector onto ``|m, r>`` for every valid opening, identity elsewhere."""
    dm_, dr = layout.sub_dim(["M"]), layout.sub_dim(["R"])
    p = np.zeros((dm_ * dr, dm_ * dr), dtype=complex)
    for m, r in valid_openings(table, com):
        p[m * dr + r, m * dr + r] = 1
    return layout.embed(["M", "R"], p)


def build_open_projector(table: ToyTable, com: int, oracle: UnitaryOracle,
                         layout: RegisterLayout) -> np.ndarray:
    """``U_open^dagger Pi_test U_open``: the states whose opening is valid."""
    if not isinstance(oracle, UnitaryOracle):
        oracle = UnitaryOracle(oracle)
    if oracle.dim != layout.dim:
        raise InvalidArgument("oracle dimension does not match layout")
    p = oracle.conjugate(test_projector(table, com, layout))
    return check_projector((p + p.conj().T) / 2, atol=1e-9)


def _zero_y_isometry(layout: RegisterLayout) -> np.ndarray:
    """Columns ``|s>|0_Y>`` for every ``s`` in ST."""
    st = layout.dims[0]
    dy = layout.dim // st
    iso = np.zeros((layout.dim, st), dtype=complex)
    iso[np.arange(st) * dy, np.arange(st)] = 1
    return iso


def amp_success_fn(p, T: int) -> np.ndarray:
    """Vectorized ``1 - (1-2p+2p^2)^(T-1) (1-p)``.

    Probabilities within ``ZERO_TOL`` of 0 or 1 are snapped to the endpoint:
    eigenvalues that small are rounding noise, and with ``T`` near ``1/t``
    the series would otherwise amplify them.
    """
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    out = np.empty_like(p)
    one = p >= 1.0 - ZERO_TOL
    zero = p <= ZERO_TOL
    mid = ~(one | zero)
    q = p[mid]
    with np.errstate(divide="ignore"):
        out[mid] = -np.expm1((T - 1) * np.log1p(-2 * q * (1 - q)) + np.log1p(-q))
    out[one] = 1.0
    out[zero] = 0.0
    return out


def _hermitian_fn(a: np.ndarray, fn) -> np.ndarray:
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return (v * fn(w)) @ v.conj().T


# --- general Kraus operators -------------------------------------------------------------------

def _block_structure(decomp):
    blocks = [2] * len(decomp.blocks2) + [1] * len(decomp.blocks1)
    starts = np.concatenate([[0], np.cumsum(blocks)[:-1]]).astype(int)
    return blocks, starts


def _pad_blocks(mat: np.ndarray, blocks, starts) -> np.ndarray:
    """Split a (Jordan-basis) operator into padded 2x2 blocks ``[i, j]``."""
    nb = len(blocks)
    out = np.zeros((nb, nb, 2, 2), dtype=complex)
    for i, (si, bi) in enumerate(zip(starts, blocks)):
        for j, (sj, bj) in enumerate(zip(starts, blocks)):
            out[i, j, :bi, :bj] = mat[si:si + bi, sj:sj + bj]
    return out


def _unpad_blocks(blk: np.ndarray, blocks, starts, dim: int) -> np.ndarray:
    out = np.zeros((dim, dim), dtype=complex)
    for i, (si, bi) in enumerate(zip(starts, blocks)):
        for j, (sj, bj) in enumerate(zip(starts, blocks)):
            out[si:si + bi, sj:sj + bj] = blk[i, j, :bi, :bj]
    return out


def _geometric_series(L: np.ndarray, T: int) -> np.ndarray:
    """``sum_{k<T} L^k`` for a batch of square matrices by binary doubling."""
    eye = np.broadcast_to(np.eye(L.shape[-1], dtype=complex), L.shape)
    S = np.zeros_like(L)
    P = eye.copy()
    for bit in bin(T)[2:]:
        S = S + P @ S
        P = P @ P
        if bit == "1":
            S = eye + L @ S
            P = L @ P
    return S


def success_kraus_general(p0: np.ndarray, p1: np.ndarray, q: np.ndarray, T: int,
                          decomp=None) -> np.ndarray:
    """``sum_h A_h^dagger (P1 Q P1) A_h`` over the successful histories ``h``.

    ``A_h`` is the product of projectors met before the first success; the sum
    is a geometric series in the map ``Y -> sum_c N_c^dagger Y N_c`` with
    ``N_c = P_c (I - P1)``, ``P_1 = p0`` and ``P_0 = I - p0``.  Every ``N_c``
    is block diagonal in the Jordan basis, so the map acts on each block pair
    independently.
    """
    decomp = decomp or jordan_decompose(p0, p1, check=False)
    V = decomp.basis()
    dim = V.shape[0]
    blocks, starts = _block_structure(decomp)
    eye = np.eye(dim)
    z = V.conj().T @ (p1 @ q @ p1) @ V
    # directions where the success projector vanishes carry no weight; clear
    # rounding noise there so the unbounded geometric factor cannot amplify it
    off = np.zeros(dim, dtype=bool)
    for k, b in enumerate(decomp.blocks1):
        if not b.c:
            off[2 * len(decomp.blocks2) + k] = True
    z[off, :] = 0
    z[:, off] = 0
    ns = [V.conj().T @ (pc @ (eye - p1)) @ V for pc in (p0, eye - p0)]
    nb = [_pad_blocks(n, blocks, starts) for n in ns]
    diag = [np.stack([n[i, i] for i in range(len(blocks))]) for n in nb]
    # row-major vec(A^dagger Y B) = kron(A^dagger, B^T) vec(Y)
    L = sum(np.einsum("iab,jcd->ijacbd", d.conj().transpose(0, 2, 1), d.transpose(0, 2, 1))
            .reshape(len(blocks), len(blocks), 4, 4) for d in diag)
    S = _geometric_series(L, T)
    zb = _pad_blocks(z, blocks, starts).reshape(len(blocks), len(blocks), 4)
    fb = np.einsum("ijab,ijb->ija", S, zb).reshape(len(blocks), len(blocks), 2, 2)
    return V @ _unpad_blocks(fb, blocks, starts, dim) @ V.conj().T


def _reference_success_kraus(p0, p1, q, T):
    """Direct iteration of the same series; quadratic in ``T``, used as an oracle."""
    eye = np.eye(p0.shape[0])
    ns = [pc @ (eye - p1) for pc in (p0, eye - p0)]
    term = p1 @ q @ p1
    total = np.zeros_like(term)
    for _ in range(T):
        total = total + term
        term = sum(n.conj().T @ term @ n for n in ns)
    return total


# --- extractor -------------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtParams:
    delta: float
    t: float
    T: int
    eps_amp: float
    variant: str

    @classmethod
    def make(cls, delta: float, variant: str = STAT_BINDING, eps_amp: float = DEFAULT_EPS_AMP,
             *, min_delta: float = MIN_DELTA):
        """``min_delta`` guards user-facing runs; the simulator schedule lowers it."""
        if variant not in VARIANTS:
            raise InvalidArgument(f"variant must be one of {VARIANTS}")
        if not (min_delta <= delta <= 1 and delta > 0):
            raise InvalidArgument(f"delta must lie in [{min_delta}, 1]")
        t = delta ** 3 / 64
        return cls(delta, t, amp_rounds_for(t, eps_amp), eps_amp, variant)


def _closed_form_applies(table: ToyTable, com: int, variant: str) -> bool:
    # the measured outcome contains the whole success projector exactly when
    # every valid opening agrees on what is measured
    valid = valid_openings(table, com)
    if variant == STAT_BINDING:
        return len({m for m, _ in valid}) <= 1
    return len(valid) <= 1


def ext_kraus(table: ToyTable, com: int, oracle: UnitaryOracle, layout: RegisterLayout,
              params: ExtParams, *, method: str = "auto") -> dict[Hashable, np.ndarray]:
    """Kraus operator on ``ST`` for every non-bottom extractor outcome.

    Outcomes are messages (stat-binding variant) or ``(m, r)`` pairs
    (strong-cb variant).  ``method`` is ``"general"``, ``"closed"`` (valid only
    when every valid opening agrees on the measured value) or ``"auto"``.
    In the closed case the operator is the amplification success function
    applied to the compressed projector ``<0_Y| Pi |0_Y>``, which needs only
    ``|ST|`` oracle columns.
    """
    if method not in ("auto", "closed", "general"):
        raise InvalidArgument("method must be auto, closed or general")
    if layout.dim > MAX_DIM:
        raise Unsupported(f"dimension {layout.dim} exceeds {MAX_DIM}")
    valid = valid_openings(table, com)
    if not valid:
        return {}
    closed = _closed_form_applies(table, com, params.variant)
    if method == "closed" and not closed:
        raise InvalidArgument("closed form needs every valid opening to agree on the measured value")
    iso = _zero_y_isometry(layout)
    if params.variant == STAT_BINDING:
        outcomes = sorted({m for m, _ in valid})
    else:
        outcomes = sorted(valid)
    if closed and method != "general":
        cols = oracle.apply(iso)
        mask = np.real(np.diag(test_projector(table, com, layout))) > 0.5
        good = cols[mask]
        compressed = good.conj().T @ good
        return {outcomes[0]: _hermitian_fn(compressed, lambda w: amp_success_fn(w, params.T))}
    pi = build_open_projector(table, com, oracle, layout)
    p0 = iso @ iso.conj().T
    decomp = jordan_decompose(p0, pi, check=False)
    kraus = {}
    for o in outcomes:
        if params.variant == STAT_BINDING:
            proj = layout.basis_projector("M", o)
        else:
            proj = layout.basis_projector("M", o[0]) @ layout.basis_projector("R", o[1])
        full = success_kraus_general(p0, pi, oracle.conjugate(proj), params.T, decomp)
        kraus[o] = iso.conj().T @ full @ iso
    return kraus


def ext_outcomes(table: ToyTable, com: int, oracle: UnitaryOracle, layout: RegisterLayout,
                 rho_st, params: ExtParams, **kw) -> tuple[dict[Hashable, np.ndarray], float]:
    """Exact subnormalized post-extraction ``ST`` states per outcome, plus the bottom mass."""
    rho = check_density(rho_st)
    out = {}
    for o, k in ext_kraus(table, com, oracle, layout, params, **kw).items():
        s = k @ rho @ k.conj().T
        if np.trace(s).real > 1e-15:
            out[o] = (s + s.conj().T) / 2
    bottom = float(np.trace(rho).real - sum(np.trace(s).real for s in out.values()))
    return out, max(bottom, 0.0)


def ext_run(table: ToyTable, com: int, adversary: ToyAdversary, rho_st, delta: float,
            variant: str = STAT_BINDING, rng=None, eps_amp: float = DEFAULT_EPS_AMP):
    """Sample one extractor run: ``(m_ext, rho_ext)`` or ``(None, None)`` on failure.

    ``m_ext`` is a message or an ``(m, r)`` pair depending on ``variant``.
    Pass ``rng=None`` for the most likely non-bottom outcome (useful in demos).
    """
    params = ExtParams.make(delta, variant, eps_amp)
    parts, bottom = ext_outcomes(table, com, adversary.oracle(), adversary.layout, rho_st, params)
    keys = list(parts)
    probs = [float(np.trace(parts[k]).real) for k in keys]
    if rng is None:
        if not keys:
            return BOTTOM, None
        i = int(np.argmax(probs))
    else:
        u = rng.random()
        acc = 0.0
        i = None
        for j, p in enumerate(probs):
            acc += p
            if u < acc:
                i = j
                break
        if i is None:
            return BOTTOM, None
    return keys[i], parts[keys[i]] / probs[i]


# --- extraction experiments ------------------------------------------------------------------

def open_outputs(table: ToyTable, com: int, oracle: UnitaryOracle, layout: RegisterLayout,
                 rho_st, keep_message=None) -> CQEnsemble:
    """Run the opener on ``rho_st``: valid ``(m, r, out)`` keep their ``ST`` state.

    With ``keep_message`` set, valid openings of any other message also go to bottom.
    """
    rho_st = np.asarray(rho_st, dtype=complex)
    y0 = np.zeros((layout.dim // layout.dims[0],) * 2, dtype=complex)
    y0[0, 0] = 1
    sigma = oracle.apply(np.kron(rho_st, y0))
    sigma = oracle.apply(sigma.conj().T).conj().T
    parts = {}
    for m, r in valid_openings(table, com):
        if keep_message is not None and m != keep_message:
            continue
        for out in range(layout.sub_dim(["Out"])):
            block = layout.sandwich_basis(sigma, {"M": m, "R": r, "Out": out}, ["ST"])
            if np.trace(block).real > 1e-15:
                parts[(m, r, out)] = block
    bottom = float(np.trace(rho_st).real) - sum(float(np.trace(v).real) for v in parts.values())
    return CQEnsemble(parts, max(bottom, 0.0))


@dataclass
class ExperimentResult:
    real: CQEnsemble
    ext: CQEnsemble
    td: float
    params: ExtParams
    ext_success: float


def _message_of(outcome):
    return outcome[0] if isinstance(outcome, tuple) else outcome


def run_extraction_experiments(adversary: ToyAdversary, delta: float,
                               variant: str = STAT_BINDING,
                               eps_amp: float = DEFAULT_EPS_AMP) -> ExperimentResult:
    """Exact real and extraction experiments for a fixed binding table and commitment."""
    if not adversary.table.is_binding():
        raise InvalidArgument("extraction experiments need binding public parameters")
    params = ExtParams.make(delta, variant, eps_amp)
    layout = adversary.layout
    oracle = adversary.oracle()
    real = open_outputs(adversary.table, adversary.com, oracle, layout, adversary.rho_st)
    parts_ext, _ = ext_outcomes(adversary.table, adversary.com, oracle, layout,
                                adversary.rho_st, params)
    merged: dict = {}
    for o, rho_o in parts_ext.items():
        run = open_outputs(adversary.table, adversary.com, oracle, layout, rho_o,
                           keep_message=_message_of(o))
        for key, v in run.parts.items():
            merged[key] = merged[key] + v if key in merged else v
    kept = sum(float(np.trace(v).real) for v in merged.values())
    ext = CQEnsemble(merged, max(float(np.trace(adversary.rho_st).real) - kept, 0.0))
    success = sum(float(np.trace(v).real) for v in parts_ext.values())
    return ExperimentResult(real, ext, ensemble_distance(real, ext), params, success)


# --- adversary fixtures ----------------------------------------------------------------------

def _unitary_with_first_column(v: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    d = v.shape[0]
    m = np.column_stack([v, gen.normal(size=(d, d - 1)) + 1j * gen.normal(size=(d, d - 1))])
    q, r = np.linalg.qr(m)
    q[:, 0] *= np.vdot(q[:, 0], v) / abs(np.vdot(q[:, 0], v))
    return q


def random_adversary(table: ToyTable, gen: np.random.Generator, *, st_dim: int = 2,
                     w_dim: int = 2, out_dim: int = 1, oblivious: bool = False,
                     honest: bool = False, com: int | None = None) -> ToyAdversary:
    """Haar-random opener, or one of two structured families.

    ``oblivious`` openers act as ``I_ST (x) V``; ``honest`` ones in addition map
    ``|0_Y>`` into a superposition of valid openings only.
    """
    if com is None:
        com = table.table[int(gen.integers(len(table.table)))]
    layout = opener_layout(st_dim, table, w_dim, out_dim)
    dy = layout.dim // st_dim
    if oblivious:
        if honest:
            ylay = RegisterLayout(layout.registers[1:])
            v = np.zeros(dy, dtype=complex)
            for m, r in valid_openings(table, com):
                for w in range(w_dim):
                    for o in range(out_dim):
                        v[ylay.basis_index({"W": w, "M": m, "R": r, "Out": o})] = (
                            gen.normal() + 1j * gen.normal())
            v /= np.linalg.norm(v)
            V = _unitary_with_first_column(v, gen)
        else:
            V = random_unitary(dy, gen)
        u = np.kron(np.eye(st_dim), V)
    else:
        u = random_unitary(layout.dim, gen)
    return ToyAdversary(table, com, random_density(st_dim, gen), u, w_dim, out_dim)


def threshold_adversary(table: ToyTable, gen: np.random.Generator, success_probs,
                        *, w_dim: int = 2, out_dim: int = 1, com: int | None = None) -> ToyAdversary:
    """Opener that succeeds with probability ``success_probs[s]`` on ``ST`` vector ``s``
    of a random frame, with a random entangling tail on each branch."""
    st_dim = len(success_probs)
    if com is None:
        com = table.table[int(gen.integers(len(table.table)))]
    layout = opener_layout(st_dim, table, w_dim, out_dim)
    ylay = RegisterLayout(layout.registers[1:])
    valid = np.zeros(ylay.dim, dtype=bool)
    for m, r in valid_openings(table, com):
        for w in range(w_dim):
            for o in range(out_dim):
                valid[ylay.basis_index({"W": w, "M": m, "R": r, "Out": o})] = True
    if valid.all():
        raise InvalidArgument("every opening is valid; pick another commitment")
    frame = random_unitary(st_dim, gen)
    u = np.zeros((layout.dim, layout.dim), dtype=complex)
    for s, q in enumerate(success_probs):
        if not 0 <= q <= 1:
            raise InvalidArgument("success probabilities must lie in [0, 1]")
        good = np.where(valid, gen.normal(size=ylay.dim) + 1j * gen.normal(size=ylay.dim), 0)
        bad = np.where(~valid, gen.normal(size=ylay.dim) + 1j * gen.normal(size=ylay.dim), 0)
        v = math.sqrt(q) * good / np.linalg.norm(good) + math.sqrt(1 - q) * bad / np.linalg.norm(bad)
        u += np.kron(np.outer(frame[:, s], frame[:, s].conj()), _unitary_with_first_column(v, gen))
    return ToyAdversary(table, com, random_density(st_dim, gen), u, w_dim, out_dim)


def superposition_abort_fixture(gen: np.random.Generator | None = None, st_dim: int = 2):
    """Opener whose ``ST`` holds ``(|psi_a> + |psi_na>)/sqrt 2``.

    On ``|psi_na>`` it writes a valid opening ``(e, r)`` of the commitment, on
    ``|psi_a>`` the invalid ``(e xor 1, r)``.  Returns ``(adversary, psi_na)``.
    """
    table = ToyTable.identity(1, 1)
    e, r = 0, 1
    com = table.lookup(e, r)
    if gen is None:
        basis = np.eye(st_dim, dtype=complex)
    else:
        basis = random_unitary(st_dim, gen)
    psi_a, psi_na = basis[:, 0], basis[:, 1]
    layout = opener_layout(st_dim, table)
    u = np.zeros((layout.dim, layout.dim), dtype=complex)
    # permutation on the (M, R) pair per ST basis vector of the chosen frame
    perm_na = {(0, 0): (e, r), (e, r): (0, 0)}
    perm_a = {(0, 0): (e ^ 1, r), (e ^ 1, r): (0, 0)}
    dmr = table.n_messages * table.n_rand
    proj_na = np.outer(psi_na, psi_na.conj())
    proj_rest = np.eye(st_dim) - proj_na
    for perm, proj in ((perm_na, proj_na), (perm_a, proj_rest)):
        p = np.zeros((dmr, dmr))
        for m in range(table.n_messages):
            for rr in range(table.n_rand):
                tgt = perm.get((m, rr), (m, rr))
                p[tgt[0] * table.n_rand + tgt[1], m * table.n_rand + rr] = 1
        u += np.kron(proj, p)
    psi = (psi_a + psi_na) / math.sqrt(2)
    return ToyAdversary(table, com, dm(psi), u), psi_na
