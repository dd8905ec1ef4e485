import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ezk.errors import InvalidArgument, Unsupported
from ezk.qsim import (amp_branches, amp_rounds_for, amp_run, amp_success_guarantee,
                      amp_success_lower_bound, amp_success_probability, amp_unitary,
                      jordan_decompose, jordan_residuals, threshold_split, trace_distance)
from ezk.qsim.amp import amp_failure
from ezk.qsim.linalg import dm, random_density, random_state

from qsim_helpers import ket, projector_pair, two_round_success

ZERO = np.diag([1, 0]).astype(complex)
PLUS = dm(ket(1, 1))

seeds = st.integers(0, 2**32 - 1)


# --- trace distance ------------------------------------------------------------------------

def test_trace_distance_examples():
    rho = random_density(4, np.random.default_rng(0))
    assert trace_distance(rho, rho) == pytest.approx(0, abs=1e-12)
    assert trace_distance(dm(ket(1, 0)), dm(ket(0, 1))) == pytest.approx(1)
    assert trace_distance(np.eye(2) / 2, ZERO) == pytest.approx(0.5)
    with pytest.raises(InvalidArgument):
        trace_distance(np.eye(2), np.eye(3))


@settings(max_examples=30, deadline=None)
@given(seed=seeds, dim=st.integers(2, 8))
def test_trace_distance_matches_singular_values(seed, dim):
    gen = np.random.default_rng(seed)
    a, b = random_density(dim, gen), random_density(dim, gen)
    oracle = 0.5 * np.linalg.svd(a - b, compute_uv=False).sum()
    td = trace_distance(a, b)
    assert td == pytest.approx(oracle, abs=1e-10)
    assert 0 <= td <= 1 + 1e-9


# --- Jordan decomposition ------------------------------------------------------------------

def test_jordan_commuting_qubit():
    d = jordan_decompose(ZERO, ZERO)
    assert d.blocks2 == []
    flags = sorted((b.b, b.c) for b in d.blocks1)
    assert flags == [(0, 0), (1, 1)]
    one = next(b for b in d.blocks1 if b.b == 1)
    assert abs(abs(one.vector[0]) - 1) < 1e-12


def test_jordan_zero_plus_single_block():
    d = jordan_decompose(ZERO, PLUS)
    assert d.blocks1 == []
    assert len(d.blocks2) == 1
    assert d.blocks2[0].p == pytest.approx(0.5, abs=1e-12)


def test_jordan_rejects_non_projector():
    with pytest.raises(InvalidArgument):
        jordan_decompose(np.diag([1, 0.5]), ZERO)
    with pytest.raises(InvalidArgument):
        jordan_decompose(ZERO, np.eye(3))
    with pytest.raises(Unsupported):
        jordan_decompose(np.zeros((4097, 4097)), np.zeros((4097, 4097)), check=False)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, dim=st.sampled_from([2, 3, 5, 8, 16, 32]))
def test_jordan_relations_on_random_pairs(seed, dim):
    gen = np.random.default_rng(seed)
    p0, p1 = projector_pair(dim, gen)
    d = jordan_decompose(p0, p1)
    res = jordan_residuals(d, p0, p1)
    assert res["reconstruction"] <= 1e-9
    assert res["completeness"] <= 1e-9
    assert max(res.values()) <= 1e-8
    for b in d.blocks2:
        assert 0 < b.p < 1
    # dimension count: two per 2D block plus one per 1D block
    assert 2 * len(d.blocks2) + len(d.blocks1) == dim
    # eigenvalues of P0 P1 P0 on range(P0) are exactly the p_j and the 1D flags
    oracle = np.sort(np.linalg.eigvalsh(p0 @ p1 @ p0))[-int(round(np.trace(p0).real)):]
    stored = sorted([b.p for b in d.blocks2] + [float(b.c) for b in d.blocks1 if b.b == 1])
    assert np.allclose(np.sort(oracle), stored, atol=1e-8)


# --- threshold split -----------------------------------------------------------------------

def test_threshold_split_examples():
    d = jordan_decompose(ZERO, PLUS)
    alpha = d.blocks2[0].alpha
    lo, hi = threshold_split(d, 0.75, alpha)
    assert np.allclose(lo, alpha) and np.allclose(hi, 0)
    lo, hi = threshold_split(d, 0.25, alpha)
    assert np.allclose(hi, alpha)

    d = jordan_decompose(ZERO, ZERO)
    v = np.array([1, 0], dtype=complex)
    lo, hi = threshold_split(d, 0.5, v)
    assert np.allclose(lo, 0) and np.allclose(hi, v)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, dim=st.sampled_from([4, 8, 16]), t=st.floats(0.05, 0.95))
def test_threshold_split_pythagoras(seed, dim, t):
    gen = np.random.default_rng(seed)
    p0, p1 = projector_pair(dim, gen)
    d = jordan_decompose(p0, p1)
    psi = random_state(dim, gen)
    lo, hi = threshold_split(d, t, psi)
    assert np.allclose(lo + hi, psi, atol=1e-10)
    assert abs(np.vdot(lo, hi)) <= 1e-10
    assert np.linalg.norm(lo) ** 2 + np.linalg.norm(hi) ** 2 == pytest.approx(1, abs=1e-10)
    plo, phi = d.threshold_projectors(t)
    assert np.linalg.norm(plo @ lo - lo) <= 1e-9 and np.linalg.norm(phi @ hi - hi) <= 1e-9


def test_threshold_basis_states_respect_t():
    gen = np.random.default_rng(3)
    p0, p1 = projector_pair(12, gen)
    d = jordan_decompose(p0, p1)
    t = 0.4
    # every alpha vector (fixed by p0) has overlap with p1 below t iff it sits low
    for b in d.blocks2:
        overlap = np.vdot(b.alpha, p1 @ b.alpha).real
        assert (overlap < t) == (b.p < t)
    for b in d.blocks1:
        if b.b == 1:
            assert np.vdot(b.vector, p1 @ b.vector).real == pytest.approx(b.c, abs=1e-9)


# --- amplification: closed form ------------------------------------------------------------

def test_lower_bound_examples():
    assert amp_success_lower_bound(0.5, 1) == 0.5
    assert amp_success_lower_bound(0.25, 3) == 0.70703125
    for T in (1, 2, 7, 100):
        assert amp_success_lower_bound(1.0, T) == 1.0
    for bad in (0.0, -0.1, 1.5, float("nan")):
        with pytest.raises(InvalidArgument):
            amp_success_lower_bound(bad, 2)
    with pytest.raises(InvalidArgument):
        amp_success_lower_bound(0.5, 0)


@settings(max_examples=60)
@given(t=st.floats(1e-3, 1.0), T=st.integers(1, 60))
def test_lower_bound_matches_markov_chain(t, T):
    assert amp_success_lower_bound(t, T) == pytest.approx(two_round_success(t, T), abs=1e-12)
    assert amp_failure(t, T) == pytest.approx(1 - two_round_success(t, T), abs=1e-12)


@settings(max_examples=40)
@given(t=st.floats(1e-3, 0.999), eps=st.floats(1e-9, 0.5))
def test_rounds_for_is_minimal(t, eps):
    T = amp_rounds_for(t, eps)
    assert amp_failure(t, T) <= eps
    if T > 1:
        assert amp_failure(t, T - 1) > eps


# --- amplification: exact branches, sampling and the unitary --------------------------------

def block_alpha(p: float):
    """A qubit pair of projectors whose single 2D block has overlap ``p``."""
    beta = ket(math.sqrt(p), math.sqrt(1 - p))
    return ZERO, dm(beta), np.array([1, 0], dtype=complex)


def test_amp_half_block_three_rounds():
    p0, p1, alpha = block_alpha(0.5)
    branches = amp_branches(p0, p1, 3, alpha)
    succ = sum(b.prob for b in branches if b.b == 1)
    assert succ == pytest.approx(0.875, abs=1e-12)
    assert sum(b.prob for b in branches) == pytest.approx(1, abs=1e-12)
    assert amp_success_probability(p0, p1, 3, dm(alpha)) == pytest.approx(0.875, abs=1e-12)


def test_amp_run_examples():
    gen = np.random.default_rng(0)
    p0, p1 = projector_pair(6, gen)
    d = jordan_decompose(p0, p1)
    in_p1 = next(b.beta for b in d.blocks2)
    b, post, outs = amp_run(p0, p1, 4, in_p1, gen)
    assert b == 1 and outs == (1,)
    assert abs(abs(np.vdot(post, in_p1)) - 1) < 1e-9
    # a vector fixed by P0 and killed by P1 never succeeds
    z = np.diag([1, 0, 0]).astype(complex)
    one = np.diag([0, 1, 0]).astype(complex)
    for _ in range(20):
        b, post, _ = amp_run(z + one, np.diag([0, 0, 1]).astype(complex), 5, [1, 0, 0], gen)
        assert b == 0


@settings(max_examples=20, deadline=None)
@given(seed=seeds, dim=st.sampled_from([3, 4, 6]), T=st.integers(1, 4))
def test_amp_success_lands_in_p1(seed, dim, T):
    gen = np.random.default_rng(seed)
    p0, p1 = projector_pair(dim, gen)
    psi = random_state(dim, gen)
    for br in amp_branches(p0, p1, T, psi):
        if br.b == 1:
            assert np.linalg.norm(p1 @ br.state - br.state) <= 1e-9


def test_amp_run_follows_born_rule():
    p0, p1, alpha = block_alpha(0.3)
    gen = np.random.default_rng(7)
    runs = 20000
    hits = sum(amp_run(p0, p1, 3, alpha, gen)[0] for _ in range(runs))
    exact = amp_success_lower_bound(0.3, 3)
    assert abs(hits / runs - exact) <= 4 * math.sqrt(exact * (1 - exact) / runs)


def test_amp_unitary_trivial_projector():
    u = amp_unitary(np.eye(2), np.eye(2), 1)
    for psi in (ket(1, 0), ket(0, 1), ket(1, 1j)):
        assert u.b_probability(u.apply(u.embed_input(psi))) == pytest.approx(1, abs=1e-12)


def test_amp_unitary_size_guard():
    with pytest.raises(Unsupported):
        amp_unitary(np.eye(8), np.eye(8), 7)
    with pytest.raises(InvalidArgument):
        amp_unitary(np.eye(2), np.eye(2), 0)


@settings(max_examples=15, deadline=None)
@given(seed=seeds, dim=st.sampled_from([2, 3, 4]), T=st.integers(1, 3))
def test_amp_unitary_matches_branches(seed, dim, T):
    gen = np.random.default_rng(seed)
    p0, p1 = projector_pair(dim, gen)
    u = amp_unitary(p0, p1, T)
    m = u.matrix()
    assert np.allclose(m.conj().T @ m, np.eye(u.dim), atol=1e-9)
    psi = random_state(dim, gen)
    out = u.apply(u.embed_input(psi))
    exact = sum(b.prob for b in amp_branches(p0, p1, T, psi) if b.b == 1)
    assert u.b_probability(out) == pytest.approx(exact, abs=1e-9)
    assert np.allclose(u.apply_inverse(out), u.embed_input(psi), atol=1e-9)


@settings(max_examples=15, deadline=None)
@given(seed=seeds, t=st.floats(0.1, 0.9), T=st.integers(1, 3))
def test_amp_unitary_preserves_threshold_subspaces(seed, t, T):
    gen = np.random.default_rng(seed)
    p0, p1 = projector_pair(4, gen)
    d = jordan_decompose(p0, p1)
    lo, hi = d.threshold_projectors(t)
    u = amp_unitary(p0, p1, T)
    m = u.matrix()
    extra = np.eye(u.dim // 4)
    LO, HI = np.kron(lo, extra), np.kron(hi, extra)
    assert np.abs(HI @ m @ LO).max() <= 1e-9
    assert np.abs(LO @ m @ HI).max() <= 1e-9


def high_state(seed: int, dim: int, t: float):
    """Random projector pair and a random unit vector of range(P0) inside S_{>=t}."""
    gen = np.random.default_rng(seed)
    p0, p1 = projector_pair(dim, gen)
    d = jordan_decompose(p0, p1)
    vecs = [b.alpha for b in d.blocks2 if b.p >= t] + [b.vector for b in d.blocks1 if b.b == 1 and b.c == 1]
    if not vecs:
        return p0, p1, None
    coeffs = gen.standard_normal(len(vecs)) + 1j * gen.standard_normal(len(vecs))
    psi = np.stack(vecs, axis=1) @ coeffs
    psi /= np.linalg.norm(psi)
    _, hi = d.threshold_projectors(t)
    assert np.linalg.norm(hi @ psi - psi) <= 1e-9
    return p0, p1, psi


@settings(max_examples=50, deadline=None)
@given(seed=seeds, dim=st.integers(2, 64), t=st.floats(0.02, 1.0), T=st.integers(1, 12))
def test_amp_meets_uniform_guarantee_on_high_states(seed, dim, t, T):
    p0, p1, psi = high_state(seed, dim, t)
    if psi is None:
        return
    assert amp_success_probability(p0, p1, T, dm(psi)) >= amp_success_guarantee(t, T) - 1e-9


@settings(max_examples=50, deadline=None)
@given(seed=seeds, dim=st.integers(2, 64), t=st.floats(0.02, 1.0), T=st.integers(1, 3))
def test_closed_form_bound_holds_up_to_three_rounds(seed, dim, t, T):
    p0, p1, psi = high_state(seed, dim, t)
    if psi is None:
        return
    assert amp_success_probability(p0, p1, T, dm(psi)) >= amp_success_lower_bound(t, T) - 1e-9
    assert amp_success_guarantee(t, T) == pytest.approx(amp_success_lower_bound(t, T), abs=1e-12)


def test_closed_form_bound_fails_for_higher_overlap_at_four_rounds():
    # the failure term grows with p past its minimum, so p = 0.8 does worse than t = 0.75
    p0, p1, alpha = block_alpha(0.8)
    succ = amp_success_probability(p0, p1, 4, dm(alpha))
    assert succ == pytest.approx(two_round_success(0.8, 4), abs=1e-12)
    assert succ < amp_success_lower_bound(0.75, 4)
    assert succ >= amp_success_guarantee(0.75, 4) - 1e-12


@settings(max_examples=40, deadline=None)
@given(t=st.floats(0.01, 1.0), T=st.integers(1, 200))
def test_uniform_guarantee_matches_grid_search(t, T):
    grid = np.linspace(t, 1, 20001)
    oracle = min(two_round_success(float(p), T) for p in grid[:: max(1, len(grid) // 4000)])
    g = amp_success_guarantee(t, T)
    assert g <= oracle + 1e-12
    assert g <= amp_success_lower_bound(t, T) + 1e-12
    # the grid cannot undershoot the true minimum by more than its spacing allows
    assert oracle - g <= 5e-3
