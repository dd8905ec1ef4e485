import itertools
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ezk import commitments as cm
from ezk.commitments import SchemeId, ToyTable, naor
from ezk.commitments.toytable import BINDING, STRICT, decode_value
from ezk.errors import InvalidArgument
from ezk.primitives import BitVector, DeterministicRng
from ezk.protocol.soundness import (bad_challenge_report, brute_force_soundness,
                                    count_accepting_responses, exhaustive_soundness_bound)
from ezk.sigma import (MODIFIED, PLAIN, CommitContext, CycleWitness, GraphInstance, OpenAll,
                       OpenCycle, SigmaFirstMsg, SigmaResponse, encode_message, extract_cycle,
                       f_bad, find_hamiltonian_cycle, instance_gen, is_hamiltonian, mh_commit,
                       mh_resp, mh_samp, mh_simresp, mh_simsamp, mh_verify, sigma_p1, sigma_p3,
                       sigma_sim, sigma_verify)
from ezk.sigma.hamiltonicity import encode_perm


def toy_ctx(table):
    return CommitContext(cm.setup(SchemeId.TOY, 2, None, table=table))


def naor_ctx(rng, lam=8):
    return CommitContext(cm.setup(SchemeId.NAOR, lam, rng))


TRANSPARENT = ToyTable.identity(1, 0)     # commitment value is the bit itself


def triangle():
    return GraphInstance.complete(3), CycleWitness((0, 1, 2))


def committed_bits(a: SigmaFirstMsg, rep: int) -> list[int]:
    return [decode_value(c.bytes) for c in a.reps[rep]]


class ScriptedRng:
    """Returns a fixed permutation and zero randomness, to enumerate exact distributions."""

    def __init__(self, perms):
        self.perms = list(perms)

    def permutation(self, n):
        return list(self.perms.pop(0))

    def randbelow(self, n):
        return 0


# --- shapes and honest runs -----------------------------------------------------------------

def test_triangle_shape(rng):
    x, _ = triangle()
    a, _ = sigma_p1(x, 2, naor_ctx(rng), rng)
    assert len(a.reps) == 2 and all(len(rep) == 9 for rep in a.reps)


def test_recommit_reproduces_first_message(rng):
    x, _ = instance_gen(5, 0.3, True, rng)
    ctx = CommitContext(cm.setup(SchemeId.NAOR, 8, rng, prg_mode="linear-toy"))
    a, st_ = sigma_p1(x, 3, ctx, rng)
    p = ctx.pp.params
    for i, rep in enumerate(a.reps):
        for j, c in enumerate(rep):
            seed = BitVector.from_bytes(st_.openings[i][j].bytes, p.lam)
            assert naor.commit_with(p, BitVector(st_.messages[i][j], 1), seed) == c.bytes


def test_permuted_complete_graph_is_itself(rng):
    x, _ = triangle()
    a, _ = sigma_p1(x, 4, toy_ctx(TRANSPARENT), rng)
    for i in range(4):
        assert committed_bits(a, i) == x.matrix_bits().to_list()


def test_zero_challenge_opens_everything(rng):
    x, w = instance_gen(5, 0.4, True, rng)
    ctx = naor_ctx(rng)
    a, st_ = sigma_p1(x, 3, ctx, rng)
    z = sigma_p3(st_, w, BitVector.zeros(3))
    for i, rep in enumerate(z.reps):
        assert isinstance(rep, OpenAll) and rep.perm == st_.perms[i]
        assert len(rep.openings) == 25
        assert x.permute(rep.perm).matrix_bits() == st_.messages[i]
    assert sigma_verify(x, ctx, a, BitVector.zeros(3), z)


def test_one_challenge_opens_image_cycle(rng):
    x, w = instance_gen(5, 0.4, True, rng)
    ctx = naor_ctx(rng)
    a, st_ = sigma_p1(x, 3, ctx, rng)
    z = sigma_p3(st_, w, BitVector.ones(3))
    for i, rep in enumerate(z.reps):
        assert isinstance(rep, OpenCycle) and len(rep.positions) == 5
        pi = st_.perms[i]
        image = {frozenset((pi[w.order[j]], pi[w.order[(j + 1) % 5]])) for j in range(5)}
        assert {frozenset(p) for p in rep.positions} == image
    assert sigma_verify(x, ctx, a, BitVector.ones(3), z)


@pytest.mark.parametrize("e", ["0110", "1010", "0001"])
def test_mixed_challenge_on_k4(e, rng):
    x = GraphInstance.complete(4)
    w = CycleWitness((0, 2, 1, 3))
    ctx = naor_ctx(rng)
    a, st_ = sigma_p1(x, 4, ctx, rng)
    ev = BitVector.from_str(e)
    assert sigma_verify(x, ctx, a, ev, sigma_p3(st_, w, ev))


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 7), st.integers(1, 4), st.integers(0, 2**32), st.sampled_from([PLAIN, MODIFIED]))
def test_completeness_property(n, reps, seed, flavor):
    g = DeterministicRng(seed)
    x, w = instance_gen(n, 0.3, True, g)
    ctx = naor_ctx(g)
    e = g.bitvector(reps)
    if flavor == PLAIN:
        a, st_ = sigma_p1(x, reps, ctx, g)
        z = sigma_p3(st_, w, e)
        assert sigma_verify(x, ctx, a, e, z)
    else:
        a, st_ = mh_commit(x, mh_samp(x, reps, g), ctx, g)
        z = mh_resp(st_, w, e)
        assert mh_verify(x, ctx, a, e, z)
    # wire encodings round-trip
    assert SigmaFirstMsg.decode(a.encode()) == a
    assert SigmaResponse.decode(z.encode()) == z


def test_two_disjoint_triangles_rejected(rng):
    x = GraphInstance.complete(6)
    ctx = naor_ctx(rng)
    a, st_ = sigma_p1(x, 1, ctx, rng)
    pi = st_.perms[0]
    tri = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]
    positions = tuple((pi[u], pi[v]) for u, v in tri)
    openings = tuple(st_.openings[0][u * 6 + v] for u, v in positions)
    z = SigmaResponse((OpenCycle(positions, openings),))
    assert not sigma_verify(x, ctx, a, BitVector.ones(1), z)


def test_wrong_witness_refused(rng):
    x, _ = instance_gen(5, 0.0, True, rng)
    a, st_ = sigma_p1(x, 1, naor_ctx(rng), rng)
    bad = CycleWitness((0, 1, 2, 3, 4))
    if not bad.is_valid_for(x):
        with pytest.raises(InvalidArgument):
            sigma_p3(st_, bad, BitVector.ones(1))


def test_tampered_responses_rejected(rng):
    x, w = instance_gen(5, 0.3, True, rng)
    ctx = naor_ctx(rng)
    a, st_ = sigma_p1(x, 2, ctx, rng)
    e = BitVector.from_str("01")
    z = sigma_p3(st_, w, e)
    assert not sigma_verify(x, ctx, a, BitVector.from_str("10"), z)
    rep0 = z.reps[0]
    swapped = OpenAll(rep0.openings[1:] + rep0.openings[:1], perm=rep0.perm)
    assert not sigma_verify(x, ctx, a, e, SigmaResponse((swapped, z.reps[1])))
    assert not sigma_verify(x, ctx, a, e, SigmaResponse(z.reps[:1]))


# --- soundness on non-members -------------------------------------------------------------

def test_star_graph_exhaustive_soundness(rng):
    x = GraphInstance.star(4)
    assert not is_hamiltonian(x)
    for klass in (STRICT, BINDING):
        table = ToyTable.generate(1, 2, klass, rng)
        assert exhaustive_soundness_bound(x, 2, table) <= 0.25
        assert exhaustive_soundness_bound(x, 1, table) <= 0.5
    # a non-binding table lets the prover answer everything
    assert exhaustive_soundness_bound(x, 2, ToyTable.one_time_pad(1)) == 1.0


@pytest.mark.parametrize("klass", [STRICT, BINDING, "otp"])
def test_exhaustive_bound_matches_brute_force(klass):
    g = DeterministicRng(8)
    r_bits = 0 if klass == STRICT else 1
    table = ToyTable.one_time_pad(1) if klass == "otp" else ToyTable.generate(1, r_bits, klass, g)
    path = GraphInstance.from_edges(3, [(0, 1), (1, 2)])
    for k in (1, 2):
        assert exhaustive_soundness_bound(path, k, table) == brute_force_soundness(path, k, table)


def test_hamiltonian_instance_bound_is_one(rng):
    x, _ = instance_gen(4, 0.2, True, rng)
    assert exhaustive_soundness_bound(x, 2, ToyTable.generate(1, 2, STRICT, rng)) == 1.0


# --- simulation ----------------------------------------------------------------------------

@settings(max_examples=20, deadline=None)
@given(st.integers(3, 6), st.integers(0, 15), st.integers(0, 2**32))
def test_simulated_transcripts_verify(n, e_bits, seed):
    g = DeterministicRng(seed)
    x, _ = instance_gen(n, 0.5, True, g)
    ctx = naor_ctx(g)
    e = BitVector(e_bits, 4)
    a, z = sigma_sim(x, e, ctx, g)
    assert sigma_verify(x, ctx, a, e, z)


def test_simulated_zero_challenge_distribution_is_exact():
    x = GraphInstance.from_edges(3, [(0, 1), (1, 2)])
    ctx = toy_ctx(TRANSPARENT)
    real, sim = Counter(), Counter()
    for perm in itertools.permutations(range(3)):
        a, _ = sigma_p1(x, 1, ctx, ScriptedRng([perm]))
        real[tuple(committed_bits(a, 0))] += 1
        a, _ = sigma_sim(x, BitVector.zeros(1), ctx, ScriptedRng([perm]))
        sim[tuple(committed_bits(a, 0))] += 1
    assert real == sim


def test_simulated_one_challenge_opens_ones(rng):
    x, _ = instance_gen(5, 0.2, True, rng)
    ctx = toy_ctx(TRANSPARENT)
    a, z = sigma_sim(x, BitVector.ones(2), ctx, rng)
    for i, rep in enumerate(z.reps):
        for (u, v) in rep.positions:
            assert committed_bits(a, i)[u * 5 + v] == 1


# --- modified flavor -----------------------------------------------------------------------

def test_modified_honest_on_triangle(rng):
    x, w = triangle()
    ctx = naor_ctx(rng)
    msgs = mh_samp(x, 3, rng)
    a, st_ = mh_commit(x, msgs, ctx, rng)
    for e in ("000", "111", "010"):
        ev = BitVector.from_str(e)
        assert mh_verify(x, ctx, a, ev, mh_resp(st_, w, ev))


def test_modified_inconsistent_message_rejected(rng):
    x, w = instance_gen(4, 0.0, True, rng)
    ctx = naor_ctx(rng)
    perm = (1, 0, 3, 2)
    H = GraphInstance.complete(4)               # not an isomorphic copy of the 4-cycle
    a, st_ = mh_commit(x, [encode_message(H, perm)], ctx, rng)
    z = SigmaResponse((OpenAll(tuple(st_.openings[0]), bits=st_.messages[0]),))
    assert not mh_verify(x, ctx, a, BitVector.zeros(1), z)


def test_modified_simulation_exhaustive_challenges_n3():
    g = DeterministicRng(21)
    x = GraphInstance.complete(3)
    ctx = naor_ctx(g)
    for e_val in range(1 << 3):
        e = BitVector(e_val, 3)
        a, st_ = mh_commit(x, mh_simsamp(x, e, g), ctx, g)
        assert mh_verify(x, ctx, a, e, mh_simresp(st_, e))


# --- bad challenge -------------------------------------------------------------------------

def test_f_bad_extremes(rng):
    x = GraphInstance.star(4)
    consistent = mh_samp(x, 3, rng)
    assert f_bad(consistent, x) == BitVector.zeros(3)
    garbage = [rng.bitvector(len(consistent[0])) for _ in range(3)]
    assert f_bad(garbage, x) == BitVector.ones(3)


def _adversarial_messages(x, g):
    """Consistent copies, complete graphs, cycles, and random strings with valid permutations."""
    n = x.n
    perm = tuple(g.permutation(n))
    yield encode_message(x.permute(perm), perm)
    yield encode_message(GraphInstance.complete(n), perm)
    yield encode_message(GraphInstance.cycle(tuple(g.permutation(n))), perm)
    yield GraphInstance.complete(n).matrix_bits() + BitVector.zeros(len(encode_perm(perm)))
    yield g.bitvector(n * n) + encode_perm(perm)


def test_star_graph_bad_challenge_exhaustive():
    g = DeterministicRng(31)
    x = GraphInstance.star(4)
    ctx = CommitContext(cm.setup(SchemeId.TOY, 2, None, table=ToyTable.generate(1, 2, STRICT, g)))
    pool = list(_adversarial_messages(x, g))
    for msgs in itertools.product(pool, repeat=2):
        rep = bad_challenge_report(x, list(msgs), ctx, g)
        assert rep.violations == 0
        fb = rep.f_bad
        for e in range(4):
            if e != fb.value:
                total = 1
                for i in range(2):
                    total *= rep.counts[i][(e >> i) & 1]
                assert total == 0


def test_accepting_response_count_matches_manual_enumeration():
    # one repetition of the triangle under a strict table: exactly 3! * 2 orientations...
    g = DeterministicRng(4)
    x, w = triangle()
    table = ToyTable.generate(1, 1, STRICT, g)
    ctx = toy_ctx(table)
    a, st_ = mh_commit(x, mh_samp(x, 1, g), ctx, g)
    coms = a.reps[0]
    # bit 0: a strict table admits exactly one opening per position and one consistent perm
    assert count_accepting_responses(x, MODIFIED, coms, 0, ctx) == 1
    # bit 1: three cycle edges, each listed in one of two orientations, in any of 3! orders
    assert count_accepting_responses(x, MODIFIED, coms, 1, ctx) == 2**3 * 6


# --- special soundness ---------------------------------------------------------------------

@settings(max_examples=20, deadline=None)
@given(st.integers(3, 7), st.integers(0, 2**32), st.sampled_from([PLAIN, MODIFIED]))
def test_extract_cycle_from_both_answers(n, seed, flavor):
    g = DeterministicRng(seed)
    x, w = instance_gen(n, 0.3, True, g)
    ctx = naor_ctx(g)
    if flavor == PLAIN:
        _, st_ = sigma_p1(x, 1, ctx, g)
        z0, z1 = sigma_p3(st_, w, BitVector.zeros(1)), sigma_p3(st_, w, BitVector.ones(1))
    else:
        _, st_ = mh_commit(x, mh_samp(x, 1, g), ctx, g)
        z0, z1 = mh_resp(st_, w, BitVector.zeros(1)), mh_resp(st_, w, BitVector.ones(1))
    found = extract_cycle(x, z0.reps[0], z1.reps[0])
    assert found.is_valid_for(x)


# --- instances -----------------------------------------------------------------------------

def test_instance_gen_triangle(rng):
    x, w = instance_gen(3, 0.0, True, rng)
    assert x == GraphInstance.complete(3)
    assert w.is_valid_for(x) and sorted(w.order) == [0, 1, 2]


def test_instance_gen_non_member_certified(rng):
    for n in (4, 5, 6):
        x, w = instance_gen(n, 0.3, False, rng)
        assert w is None and find_hamiltonian_cycle(x) is None
        # brute-force certifier: no vertex order closes a cycle
        assert not any(all(x.has_edge(o[i], o[(i + 1) % n]) for i in range(n))
                       for o in itertools.permutations(range(n)))


@settings(max_examples=30)
@given(st.integers(3, 12), st.floats(0, 1), st.integers(0, 2**32))
def test_planted_witness_valid(n, p, seed):
    x, w = instance_gen(n, p, True, DeterministicRng(seed))
    assert w.is_valid_for(x)
    assert GraphInstance.decode(x.encode()) == x
