"""Alternating-projector amplification: closed form, exact branches, sampling and
its purified unitary."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import InvalidArgument, Unsupported
from .linalg import as_matrix

UNITARY_GUARD = 1 << 14
MATRIX_GUARD = 1 << 12
DEFAULT_EPS_AMP = 2.0 ** -20


def _check_t(t: float) -> None:
    if not (0 < t <= 1) or math.isnan(t):
        raise InvalidArgument("t must lie in (0, 1]")


def amp_failure(p: float, T: int) -> float:
    """Failure probability ``(1-2p+2p^2)^(T-1) (1-p)`` of T rounds started on a 2D block."""
    if T < 1:
        raise InvalidArgument("T must be at least 1")
    if p >= 1:
        return 0.0
    if p <= 0:
        return 1.0
    base = 2 * p * (1 - p)          # 1 - base = 1 - 2p + 2p^2
    return math.exp((T - 1) * math.log1p(-base) + math.log1p(-p))


EXACT_T_LIMIT = 2048


def amp_success_lower_bound(t: float, T: int) -> float:
    """``1 - (1-2t+2t^2)^(T-1) (1-t)``.

    Small ``T`` is evaluated in exact rational arithmetic and rounded once, so
    the value does not depend on the platform's ``pow``.
    """
    _check_t(t)
    if T < 1:
        raise InvalidArgument("T must be at least 1")
    if t == 1:
        return 1.0
    if T <= EXACT_T_LIMIT:
        q = Fraction(t)
        return float(1 - (1 - 2 * q + 2 * q * q) ** (T - 1) * (1 - q))
    return 1 - amp_failure(t, T)


def amp_success_guarantee(t: float, T: int) -> float:
    """Least success probability over every block with overlap ``p >= t``.

    The failure term is not monotone in ``p`` once ``T >= 4``, so the worst
    block need not be ``p = t``.  Its stationary points solve
    ``(4T-2) p^2 - (6T-4) p + (2T-1) = 0``; the maximum failure over
    ``[t, 1]`` is taken at one of them or at ``t``.
    """
    _check_t(t)
    if T < 1:
        raise InvalidArgument("T must be at least 1")
    candidates = [t]
    a, b, c = 4 * T - 2, -(6 * T - 4), 2 * T - 1
    disc = b * b - 4 * a * c
    if disc >= 0:
        r = math.sqrt(disc)
        candidates += [p for p in ((-b - r) / (2 * a), (-b + r) / (2 * a)) if t < p < 1]
    return 1 - max(amp_failure(p, T) for p in candidates)


def amp_rounds_for(t: float, eps: float = DEFAULT_EPS_AMP) -> int:
    """Least T whose failure term is at most ``eps``."""
    _check_t(t)
    if not 0 < eps < 1:
        raise InvalidArgument("eps must lie in (0, 1)")
    if amp_failure(t, 1) <= eps:
        return 1
    base = 2 * t * (1 - t)
    # (T-1) log1p(-base) + log1p(-t) <= log eps
    T = 1 + math.ceil((math.log(eps) - math.log1p(-t)) / math.log1p(-base))
    if T > 1 << 50:
        # beyond float resolution neighbouring T give identical failure values
        return T
    while T > 1 and amp_failure(t, T - 1) <= eps:
        T -= 1
    while amp_failure(t, T) > eps:
        T += 1
    return T


# --- exact outcome enumeration -----------------------------------------------------------------

@dataclass(frozen=True)
class AmpBranch:
    """One measurement history: Pi1 outcomes and Pi0 outcomes interleaved."""

    outcomes: tuple[int, ...]
    b: int
    state: np.ndarray          # unnormalized post-measurement state

    @property
    def prob(self) -> float:
        return float(np.vdot(self.state, self.state).real)


def amp_branches(p0, p1, T: int, state, prune: float = 1e-15) -> list[AmpBranch]:
    """Every history of the T-round procedure with nonzero weight.

    Each round measures the second projector; success halts, otherwise the
    first projector is measured and the next round starts.
    """
    p0, p1 = as_matrix(p0), as_matrix(p1)
    if T < 1:
        raise InvalidArgument("T must be at least 1")
    eye = np.eye(p0.shape[0])
    q0, q1 = eye - p0, eye - p1
    live = [((), np.asarray(state, dtype=complex).reshape(-1))]
    done: list[AmpBranch] = []
    for _ in range(T):
        nxt = []
        for hist, v in live:
            s = p1 @ v
            if np.vdot(s, s).real > prune:
                done.append(AmpBranch(hist + (1,), 1, s))
            f = q1 @ v
            if np.vdot(f, f).real <= prune:
                continue
            for c, proj in ((1, p0), (0, q0)):
                w = proj @ f
                if np.vdot(w, w).real > prune:
                    nxt.append((hist + (0, c), w))
        live = nxt
    done += [AmpBranch(h, 0, v) for h, v in live]
    return done


def amp_success_probability(p0, p1, T: int, rho) -> float:
    """Exact success probability on a density matrix via dephasing recursion."""
    p0, p1 = as_matrix(p0), as_matrix(p1)
    rho = as_matrix(rho)
    eye = np.eye(p0.shape[0])
    q0, q1 = eye - p0, eye - p1
    succ = 0.0
    for _ in range(T):
        succ += float(np.trace(p1 @ rho).real)
        rho = q1 @ rho @ q1
        rho = p0 @ rho @ p0 + q0 @ rho @ q0
    return succ


def amp_run(p0, p1, T: int, state, rng) -> tuple[int, np.ndarray, tuple[int, ...]]:
    """Sample one execution following the Born rule; returns ``(b, post, outcomes)``."""
    p0, p1 = as_matrix(p0), as_matrix(p1)
    eye = np.eye(p0.shape[0])
    v = np.asarray(state, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    outcomes: list[int] = []
    for _ in range(T):
        s = p1 @ v
        ps = float(np.vdot(s, s).real)
        if rng.random() < ps:
            outcomes.append(1)
            return 1, s / np.sqrt(ps), tuple(outcomes)
        outcomes.append(0)
        v = (eye - p1) @ v
        v /= np.linalg.norm(v)
        s = p0 @ v
        ps = float(np.vdot(s, s).real)
        if rng.random() < ps:
            outcomes.append(1)
            v = s / np.sqrt(ps)
        else:
            outcomes.append(0)
            v = (eye - p0) @ v
            v /= np.linalg.norm(v)
    return 0, v, tuple(outcomes)


# --- purified unitary ---------------------------------------------------------------------------

class AmpUnitary:
    """Coherent version of the procedure over ``space (x) B (x) Anc``.

    ``Anc`` holds two qubits per round: the second-projector outcome ``a_i``
    and the first-projector outcome ``c_i``.  Round ``i`` acts only when every
    earlier ``a_j`` is 0; ``B`` is finally XORed with the OR of all ``a_j``.
    Flat index order: space (most significant), B, then ``a_1 c_1 ... a_T c_T``.
    """

    def __init__(self, p0, p1, T: int):
        self.p0, self.p1 = as_matrix(p0), as_matrix(p1)
        self.T = T
        self.space = self.p0.shape[0]
        self.n_anc = 2 * T
        self.dim = self.space * 2 * (1 << self.n_anc)

    def _a_bit(self, i: int) -> int:
        return 1 << (self.n_anc - 1 - 2 * i)

    def _c_bit(self, i: int) -> int:
        return 1 << (self.n_anc - 2 - 2 * i)

    def _steps(self, inverse: bool):
        rounds = range(self.T - 1, -1, -1) if inverse else range(self.T)
        for i in rounds:
            yield i

    def _apply_tensor(self, psi: np.ndarray, inverse: bool) -> np.ndarray:
        # psi shape: (space, 2, 4^T, k)
        na = 1 << self.n_anc
        eye = np.eye(self.space)
        ops = {"a": (self.p1, eye - self.p1), "c": (self.p0, eye - self.p0)}

        def controlled_flip(psi, bit, proj, cond_mask, cond_zero_bits):
            out = psi.copy()
            for k in range(na):
                if k & cond_mask:
                    continue
                if k & bit:
                    continue
                k1 = k | bit
                x0 = psi[:, :, k]
                x1 = psi[:, :, k1]
                p, q = proj
                out[:, :, k] = np.einsum("ij,jb...->ib...", q, x0) + np.einsum("ij,jb...->ib...", p, x1)
                out[:, :, k1] = np.einsum("ij,jb...->ib...", q, x1) + np.einsum("ij,jb...->ib...", p, x0)
            return out

        def or_into_b(psi):
            out = psi.copy()
            mask = sum(self._a_bit(i) for i in range(self.T))
            for k in range(na):
                if k & mask:
                    out[:, 0, k], out[:, 1, k] = psi[:, 1, k], psi[:, 0, k]
            return out

        seq = []
        for i in range(self.T):
            earlier = sum(self._a_bit(j) for j in range(i))
            seq.append((self._a_bit(i), ops["a"], earlier))
            seq.append((self._c_bit(i), ops["c"], earlier | self._a_bit(i)))
        if not inverse:
            for bit, proj, cond in seq:
                psi = controlled_flip(psi, bit, proj, cond, None)
            return or_into_b(psi)
        # every step is an involution, so the inverse applies them in reverse order
        psi = or_into_b(psi)
        for bit, proj, cond in reversed(seq):
            psi = controlled_flip(psi, bit, proj, cond, None)
        return psi

    def apply(self, vecs, inverse: bool = False) -> np.ndarray:
        v = np.asarray(vecs, dtype=complex)
        single = v.ndim == 1
        if single:
            v = v[:, None]
        k = v.shape[1]
        psi = v.reshape(self.space, 2, 1 << self.n_anc, k)
        out = self._apply_tensor(psi, inverse).reshape(self.dim, k)
        return out[:, 0] if single else out

    def apply_inverse(self, vecs) -> np.ndarray:
        return self.apply(vecs, inverse=True)

    def matrix(self) -> np.ndarray:
        if self.dim > MATRIX_GUARD:
            raise Unsupported(f"dense matrix limited to dimension {MATRIX_GUARD}")
        return self.apply(np.eye(self.dim, dtype=complex))

    def embed_input(self, state) -> np.ndarray:
        """``state (x) |0>_B |0>_Anc``."""
        v = np.zeros((self.space, 2, 1 << self.n_anc), dtype=complex)
        v[:, 0, 0] = np.asarray(state, dtype=complex).reshape(-1)
        return v.reshape(-1)

    def b_probability(self, out) -> float:
        t = np.asarray(out).reshape(self.space, 2, -1)
        return float(np.sum(np.abs(t[:, 1, :]) ** 2))


def amp_unitary(p0, p1, T: int) -> AmpUnitary:
    if T < 1:
        raise InvalidArgument("T must be at least 1")
    u = AmpUnitary(p0, p1, T)
    if u.dim > UNITARY_GUARD:
        raise Unsupported(f"amplification unitary limited to dimension {UNITARY_GUARD}")
    return u
