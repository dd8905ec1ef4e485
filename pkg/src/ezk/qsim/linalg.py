"""Dense state, projector and distance utilities."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgument

ATOL = 1e-10


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidArgument("expected a square matrix")
    return m


def check_projector(p, atol: float = ATOL) -> np.ndarray:
    p = as_matrix(p)
    if not np.allclose(p @ p, p, atol=atol) or not np.allclose(p, p.conj().T, atol=atol):
        raise InvalidArgument("not an orthogonal projector")
    return p


def check_unitary(u, atol: float = ATOL) -> np.ndarray:
    u = as_matrix(u)
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol):
        raise InvalidArgument("not a unitary")
    return u


def check_state(psi, atol: float = ATOL) -> np.ndarray:
    """Possibly subnormalized pure state."""
    v = np.asarray(psi, dtype=complex).reshape(-1)
    n = float(np.vdot(v, v).real)
    if n > 1 + atol:
        raise InvalidArgument("state norm exceeds one")
    return v


def check_density(rho, atol: float = 1e-8) -> np.ndarray:
    r = as_matrix(rho)
    if not np.allclose(r, r.conj().T, atol=atol):
        raise InvalidArgument("density matrix is not Hermitian")
    if np.linalg.eigvalsh((r + r.conj().T) / 2).min() < -atol:
        raise InvalidArgument("density matrix is not positive semidefinite")
    if np.trace(r).real > 1 + ATOL:
        raise InvalidArgument("density matrix trace exceeds one")
    return r


def dm(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def trace_norm(a) -> float:
    a = as_matrix(a)
    h = (a + a.conj().T) / 2
    return float(np.abs(np.linalg.eigvalsh(h)).sum())


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of the difference."""
    rho, sigma = as_matrix(rho), as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise InvalidArgument("dimension mismatch")
    return 0.5 * trace_norm(rho - sigma)


def fidelity_pure(psi, rho) -> float:
    """``<psi|rho|psi>`` for a unit vector ``psi``."""
    v = np.asarray(psi, dtype=complex).reshape(-1)
    return float(np.vdot(v, as_matrix(rho) @ v).real)


def psd_sqrt(a) -> np.ndarray:
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    w = np.clip(w, 0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def range_basis(p, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (columns) of the range of a projector."""
    w, v = np.linalg.eigh((p + p.conj().T) / 2)
    return v[:, w > 0.5]


def projector_onto(vectors) -> np.ndarray:
    """Projector onto the span of the given columns (assumed orthonormal)."""
    v = np.asarray(vectors, dtype=complex)
    return v @ v.conj().T


# --- random objects -----------------------------------------------------------------------

def random_unitary(dim: int, gen: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_state(dim: int, gen: np.random.Generator) -> np.ndarray:
    v = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, gen: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = rank or dim
    g = gen.standard_normal((dim, rank)) + 1j * gen.standard_normal((dim, rank))
    r = g @ g.conj().T
    return r / np.trace(r).real


def random_projector(dim: int, rank: int, gen: np.random.Generator) -> np.ndarray:
    u = random_unitary(dim, gen)
    v = u[:, :rank]
    return v @ v.conj().T
