"""Trace-distance bound for two-component pure-state mixtures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument
from .linalg import random_state, trace_distance


def _prob(name: str, p: float) -> float:
    p = float(p)
    if not 0 <= p <= 1:
        raise InvalidArgument(f"{name} must lie in [0, 1]")
    return p


def mixture_distance_bound(p0: float, p1: float, p_mid: float, ip_psi: complex, ip_psi_prime: complex) -> float:
    """``|p0-p~| + |p1-p~| + p~ sqrt(1-|ip|^2) + (1-p~) sqrt(1-|ip'|^2)``."""
    p0, p1, p_mid = _prob("p0", p0), _prob("p1", p1), _prob("p_mid", p_mid)
    a, b = abs(complex(ip_psi)), abs(complex(ip_psi_prime))
    if a > 1 + 1e-12 or b > 1 + 1e-12:
        raise InvalidArgument("inner products must have modulus at most 1")
    a, b = min(a, 1.0), min(b, 1.0)
    return (abs(p0 - p_mid) + abs(p1 - p_mid)
            + p_mid * math.sqrt(1 - a * a) + (1 - p_mid) * math.sqrt(1 - b * b))


def two_component_mixture(p: float, psi, psi_prime) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi_prime = np.asarray(psi_prime, dtype=complex)
    return p * np.outer(psi, psi.conj()) + (1 - p) * np.outer(psi_prime, psi_prime.conj())


@dataclass(frozen=True)
class MixtureInstance:
    p0: float
    p1: float
    p_mid: float
    td: float
    bound: float


def random_mixture_instance(dim: int, gen: np.random.Generator) -> MixtureInstance:
    """Random mixtures with random weights; ``p~`` drawn independently."""
    psi = [random_state(dim, gen) for _ in range(4)]
    p0, p1, p_mid = (float(x) for x in gen.random(3))
    s0 = two_component_mixture(p0, psi[0], psi[1])
    s1 = two_component_mixture(p1, psi[2], psi[3])
    bound = mixture_distance_bound(p0, p1, p_mid, np.vdot(psi[0], psi[2]), np.vdot(psi[1], psi[3]))
    return MixtureInstance(p0, p1, p_mid, trace_distance(s0, s1), bound)
