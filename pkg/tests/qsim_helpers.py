import numpy as np

from ezk.qsim.linalg import random_projector


def projector_pair(dim: int, gen: np.random.Generator):
    r0 = int(gen.integers(1, dim))
    r1 = int(gen.integers(1, dim))
    return random_projector(dim, r0, gen), random_projector(dim, r1, gen)


def ket(*amps):
    v = np.asarray(amps, dtype=complex)
    return v / np.linalg.norm(v)


def two_round_success(p: float, T: int) -> float:
    """Success probability of the alternating procedure on a 2D block, by a
    Markov chain over {alpha, alpha_perp} x {beta, beta_perp} outcomes."""
    # start in alpha; each round: measure beta (prob = overlap), else land in
    # beta_perp, then measure alpha (prob 1-p from beta_perp) or alpha_perp (p)
    in_alpha, in_alpha_perp, succ = 1.0, 0.0, 0.0
    for _ in range(T):
        s = in_alpha * p + in_alpha_perp * (1 - p)
        succ += s
        # the surviving weight now sits in beta_perp
        fail = in_alpha + in_alpha_perp - s
        in_alpha, in_alpha_perp = fail * (1 - p), fail * p
    return succ
