"""Joint block decomposition of two projectors into 1D and 2D invariant subspaces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidArgument, Unsupported
from .linalg import check_projector

MAX_DIM = 1 << 12
EDGE_TOL = 1e-10


@dataclass(frozen=True)
class Block2:
    """A 2D subspace: ``alpha`` is fixed by the first projector, ``beta`` by the second,
    ``p = <alpha|P1|alpha>`` lies strictly between 0 and 1."""

    p: float
    alpha: np.ndarray
    alpha_perp: np.ndarray
    beta: np.ndarray
    beta_perp: np.ndarray


@dataclass(frozen=True)
class Block1:
    """A 1D subspace on which the first projector acts as ``b`` and the second as ``c``."""

    b: int
    c: int
    vector: np.ndarray


@dataclass(frozen=True)
class JordanDecomposition:
    dim: int
    blocks2: list[Block2] = field(default_factory=list)
    blocks1: list[Block1] = field(default_factory=list)

    def basis(self) -> np.ndarray:
        """Unitary whose columns are, in order: (alpha, alpha_perp) per 2D block,
        then every 1D vector."""
        cols = []
        for b in self.blocks2:
            cols += [b.alpha, b.alpha_perp]
        cols += [b.vector for b in self.blocks1]
        if not cols:
            return np.zeros((self.dim, 0), dtype=complex)
        return np.stack(cols, axis=1)

    def reconstruct(self) -> tuple[np.ndarray, np.ndarray]:
        p0 = np.zeros((self.dim, self.dim), dtype=complex)
        p1 = np.zeros_like(p0)
        for b in self.blocks2:
            p0 += np.outer(b.alpha, b.alpha.conj())
            p1 += np.outer(b.beta, b.beta.conj())
        for b in self.blocks1:
            v = np.outer(b.vector, b.vector.conj())
            p0 += b.b * v
            p1 += b.c * v
        return p0, p1

    def subspace_projectors(self) -> list[np.ndarray]:
        out = []
        for b in self.blocks2:
            out.append(np.outer(b.alpha, b.alpha.conj()) + np.outer(b.alpha_perp, b.alpha_perp.conj()))
        for b in self.blocks1:
            out.append(np.outer(b.vector, b.vector.conj()))
        return out

    def threshold_projectors(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Projectors onto the low (``p < t`` or second projector 0) and high parts."""
        lo = np.zeros((self.dim, self.dim), dtype=complex)
        hi = np.zeros_like(lo)
        for b in self.blocks2:
            q = np.outer(b.alpha, b.alpha.conj()) + np.outer(b.alpha_perp, b.alpha_perp.conj())
            if b.p < t:
                lo += q
            else:
                hi += q
        for b in self.blocks1:
            q = np.outer(b.vector, b.vector.conj())
            if b.c:
                hi += q
            else:
                lo += q
        return lo, hi


def _orthonormal_complement(covered: np.ndarray, dim: int) -> np.ndarray:
    w, v = np.linalg.eigh(np.eye(dim) - covered)
    return v[:, w > 0.5]


def jordan_decompose(p0, p1, *, check: bool = True) -> JordanDecomposition:
    p0 = check_projector(p0) if check else np.asarray(p0, dtype=complex)
    p1 = check_projector(p1) if check else np.asarray(p1, dtype=complex)
    dim = p0.shape[0]
    if p1.shape != p0.shape:
        raise InvalidArgument("projectors act on different spaces")
    if dim > MAX_DIM:
        raise Unsupported(f"decomposition limited to dimension {MAX_DIM}")
    w0, v0 = np.linalg.eigh((p0 + p0.conj().T) / 2)
    r0 = v0[:, w0 > 0.5]
    blocks2, blocks1 = [], []
    covered = np.zeros((dim, dim), dtype=complex)
    if r0.shape[1]:
        m = r0.conj().T @ p1 @ r0
        ps, us = np.linalg.eigh((m + m.conj().T) / 2)
        for p, u in zip(ps, us.T):
            alpha = r0 @ u
            alpha /= np.linalg.norm(alpha)
            covered += np.outer(alpha, alpha.conj())
            if p >= 1 - EDGE_TOL:
                blocks1.append(Block1(1, 1, alpha))
            elif p <= EDGE_TOL:
                blocks1.append(Block1(1, 0, alpha))
            else:
                p = float(p)
                beta = p1 @ alpha
                beta /= np.linalg.norm(beta)
                s, c = np.sqrt(p), np.sqrt(1 - p)
                # fix the phase so that <beta|alpha> = sqrt(p) exactly
                phase = np.vdot(beta, alpha)
                beta *= phase / abs(phase)
                beta_perp = (alpha - s * beta) / c
                beta_perp /= np.linalg.norm(beta_perp)
                alpha_perp = (beta - s * alpha) / c
                alpha_perp /= np.linalg.norm(alpha_perp)
                covered += np.outer(alpha_perp, alpha_perp.conj())
                blocks2.append(Block2(p, alpha, alpha_perp, beta, beta_perp))
    rest = _orthonormal_complement(covered, dim)
    if rest.shape[1]:
        m = rest.conj().T @ p1 @ rest
        cs, us = np.linalg.eigh((m + m.conj().T) / 2)
        for c, u in zip(cs, us.T):
            v = rest @ u
            v /= np.linalg.norm(v)
            blocks1.append(Block1(0, int(c > 0.5), v))
    return JordanDecomposition(dim, blocks2, blocks1)


def threshold_split(decomp: JordanDecomposition, t: float, state) -> tuple[np.ndarray, np.ndarray]:
    """Components of ``state`` in the low-``p`` and high-``p`` subspaces."""
    v = np.asarray(state, dtype=complex).reshape(-1)
    if v.shape[0] != decomp.dim:
        raise InvalidArgument("state dimension mismatch")
    lo, hi = decomp.threshold_projectors(t)
    return lo @ v, hi @ v


def jordan_residuals(decomp: JordanDecomposition, p0, p1) -> dict[str, float]:
    """Largest violation of each structural relation of the decomposition."""
    p0 = np.asarray(p0, dtype=complex)
    p1 = np.asarray(p1, dtype=complex)
    r = {"norms": 0.0, "fixed": 0.0, "annihilated": 0.0, "overlap": 0.0, "expansion": 0.0,
         "orthogonality": 0.0, "completeness": 0.0, "reconstruction": 0.0}
    for b in decomp.blocks2:
        for v in (b.alpha, b.alpha_perp, b.beta, b.beta_perp):
            r["norms"] = max(r["norms"], abs(np.linalg.norm(v) - 1))
        r["fixed"] = max(r["fixed"], np.linalg.norm(p0 @ b.alpha - b.alpha), np.linalg.norm(p1 @ b.beta - b.beta))
        r["annihilated"] = max(r["annihilated"], np.linalg.norm(p0 @ b.alpha_perp), np.linalg.norm(p1 @ b.beta_perp))
        r["overlap"] = max(r["overlap"], abs(np.vdot(b.alpha, p1 @ b.alpha).real - b.p))
        s, c = np.sqrt(b.p), np.sqrt(1 - b.p)
        r["expansion"] = max(r["expansion"],
                             np.linalg.norm(b.alpha - (s * b.beta + c * b.beta_perp)),
                             np.linalg.norm(b.beta - (s * b.alpha + c * b.alpha_perp)))
    for b in decomp.blocks1:
        r["norms"] = max(r["norms"], abs(np.linalg.norm(b.vector) - 1))
        r["fixed"] = max(r["fixed"], np.linalg.norm(p0 @ b.vector - b.b * b.vector),
                         np.linalg.norm(p1 @ b.vector - b.c * b.vector))
    basis = decomp.basis()
    if basis.shape[1]:
        r["orthogonality"] = float(np.abs(basis.conj().T @ basis - np.eye(basis.shape[1])).max())
    r["completeness"] = float(np.abs(sum(decomp.subspace_projectors()) - np.eye(decomp.dim)).max()) \
        if decomp.dim else 0.0
    q0, q1 = decomp.reconstruct()
    r["reconstruction"] = float(max(np.abs(q0 - p0).max(), np.abs(q1 - p1).max()))
    return {k: float(v) for k, v in r.items()}
