"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with its measurements and
wall time, and fails if its runtime budget is exceeded.
"""

import contextlib
import itertools
import math
import time

import numpy as np
import pytest

from ezk import commitments as cm
from ezk.commitments import SchemeId, ToyTable
from ezk.commitments.analysis import is_binding_pp
from ezk.commitments.toytable import BINDING, STRICT
from ezk.primitives import BitVector, DeterministicRng
from ezk.protocol import (ABORT_IF_FIRST_BIT, MsgType, ProtocolConfig, ScriptedVerifier, Verdict,
                          run_protocol)
from ezk.protocol.soundness import (bad_challenge_report, brute_force_soundness,
                                    exhaustive_soundness_bound)
from ezk.qsim import (amp_success_guarantee, amp_success_lower_bound, ext_run, fidelity_pure,
                      fixture_suite, jordan_decompose, jordan_residuals, random_adversary,
                      random_mixture_instance, rewind_experiment, run_extraction_experiments,
                      sim_error_budget, simulate, superposition_abort_fixture,
                      threshold_adversary)
from ezk.qsim.amp import amp_success_probability
from ezk.qsim.linalg import dm, random_density
from ezk.qsim.watrous import hadamard_procedure, random_premise_fixture
from ezk.sigma import (MODIFIED, PLAIN, CommitContext, CycleWitness, GraphInstance, encode_message,
                       instance_gen, is_hamiltonian)
from ezk.sigma.hamiltonicity import encode_perm
from ezk.wipok import (BRANCH_A, BRANCH_B, ResettableProver, WipokConfig, extract_knowledge,
                       make_protocol, measure_extraction_exponent, wipok_run, witness_is_valid)

from golden_cases import CASES, GOLDEN
from qsim_helpers import projector_pair
from test_protocol import first_bit_bias
from wipok_helpers import LINEAR_STRICT, toy_statement

pytestmark = pytest.mark.acceptance


@pytest.fixture
def criterion(capsys):
    """Yields a dict for notes; prints the verdict line and enforces the time budget."""

    @contextlib.contextmanager
    def run(number: int, title: str, budget: float):
        notes: dict = {}
        start = time.perf_counter()
        status, error = "PASS", None
        try:
            yield notes
        except Exception as exc:
            status, error = "FAIL", exc
        elapsed = time.perf_counter() - start
        if error is None and elapsed > budget:
            status = "FAIL"
            error = AssertionError(f"runtime {elapsed:.1f}s exceeds {budget:.0f}s")
        detail = ", ".join(f"{k}={v}" for k, v in notes.items())
        with capsys.disabled():
            print(f"\n[{status}] criterion {number:2d}: {title} ({elapsed:.2f}s/{budget:.0f}s)"
                  + (f" {detail}" if detail else ""))
        if error is not None:
            raise error

    return run


def test_01_round_counts(criterion):
    with criterion(1, "round counts", 1.0) as notes:
        x, w = instance_gen(5, 0.3, True, DeterministicRng(0))
        proof = run_protocol(x, w, ProtocolConfig.proof(lam_reps=8), seed=0)
        arg = run_protocol(x, w, ProtocolConfig.argument(lam=8, lam_reps=8, wipok_reps=2), seed=0)
        notes.update(proof=len(proof.transcript.messages), argument=len(arg.transcript.messages))
        assert proof.verdict is Verdict.ACCEPT and arg.verdict is Verdict.ACCEPT
        assert len(proof.transcript.messages) == 5
        assert len(arg.transcript.messages) == 9
        assert MsgType.ABORT not in [m.msg_type for m in proof.transcript.messages]


PAIRINGS = {
    "proof/HM+Naor-xof": (ProtocolConfig.proof(lam=16, lam_reps=8), (3, 6)),
    "argument/Naor+Naor-linear": (ProtocolConfig.argument(lam=8, lam_reps=1, wipok_reps=1), (3, 4)),
}


@pytest.mark.parametrize("pairing", sorted(PAIRINGS))
def test_02_perfect_completeness(criterion, pairing):
    cfg, (lo, hi) = PAIRINGS[pairing]
    with criterion(2, f"perfect completeness [{pairing}]", 30.0) as notes:
        g = DeterministicRng(2).fork(pairing)
        accepted = 0
        runs = 1000
        for i in range(runs):
            n = lo + g.randbelow(hi - lo + 1)
            x, w = instance_gen(n, 0.3, True, g)
            accepted += run_protocol(x, w, cfg, seed=i).verdict is Verdict.ACCEPT
        notes.update(runs=runs, rate=accepted / runs)
        assert accepted == runs


def _non_members():
    g = DeterministicRng(3)
    out = [GraphInstance.star(4), GraphInstance.from_edges(3, [(0, 1), (1, 2)])]
    for n in (3, 4, 5, 5, 6):
        x, _ = instance_gen(n, 0.5, False, g)
        out.append(x)
    assert not any(is_hamiltonian(x) for x in out)
    return out


def test_03_toy_soundness(criterion):
    with criterion(3, "toy soundness, exhaustive k <= 2", 300.0) as notes:
        g = DeterministicRng(4)
        worst = {PLAIN: 0.0, MODIFIED: 0.0}
        checked = 0
        for x in _non_members():
            for klass, r_bits in ((STRICT, 1), (STRICT, 2), (BINDING, 1), (BINDING, 2)):
                table = ToyTable.generate(1, r_bits, klass, g)
                assert is_binding_pp(cm.setup(SchemeId.TOY, 2, None, table=table))
                for flavor in (PLAIN, MODIFIED):
                    for k in (1, 2):
                        bound = exhaustive_soundness_bound(x, k, table, flavor=flavor)
                        worst[flavor] = max(worst[flavor], bound * 2 ** k)
                        checked += 1
                        assert bound <= 2.0 ** -k
        # independent cross-check: enumerate every plain first message over the smallest strict table
        tiny = ToyTable.generate(1, 0, STRICT, g)
        for x in [y for y in _non_members() if y.n == 3]:
            for k in (1, 2):
                assert exhaustive_soundness_bound(x, k, tiny) == brute_force_soundness(x, k, tiny)
        notes.update(bounds=checked, max_ratio_plain=worst[PLAIN], max_ratio_modified=worst[MODIFIED])


def _message_pool(x, g):
    n = x.n
    for perm in itertools.permutations(range(n)):
        yield encode_message(x.permute(perm), perm)
        yield encode_message(GraphInstance.complete(n), perm)
        yield encode_message(GraphInstance.cycle(tuple(g.permutation(n))), perm)
        yield g.bitvector(n * n) + encode_perm(perm)
    yield GraphInstance.complete(n).matrix_bits() + BitVector.zeros(len(encode_perm(tuple(range(n)))))


def test_04_bad_challenge_searchability(criterion):
    with criterion(4, "bad-challenge searchability", 300.0) as notes:
        g = DeterministicRng(5)
        strict = CommitContext(cm.setup(SchemeId.TOY, 2, None, table=ToyTable.generate(1, 2, STRICT, g)))
        binding = CommitContext(cm.setup(SchemeId.TOY, 2, None, table=ToyTable.generate(1, 2, BINDING, g)))
        checked = 0
        # n = 3: every possible first message of one repetition
        path = GraphInstance.from_edges(3, [(0, 1), (1, 2)])
        width = 9 + len(encode_perm((0, 1, 2)))
        for v in range(1 << width):
            rep = bad_challenge_report(path, [BitVector(v, width)], strict, g)
            assert rep.violations == 0
            checked += 1
        # n = 4, 5: every permutation with consistent and inconsistent graphs
        for x in [y for y in _non_members() if 4 <= y.n <= 5]:
            for ctx in (strict, binding):
                for m in _message_pool(x, g):
                    assert bad_challenge_report(x, [m], ctx, g).violations == 0
                    checked += 1
        # up to three repetitions: no challenge other than f_bad has an accepting response
        joint = 0
        for x in [y for y in _non_members() if y.n <= 5]:
            pool = list(itertools.islice(_message_pool(x, g), 4))
            for reps in (2, 3):
                for msgs in itertools.product(pool, repeat=reps):
                    rep = bad_challenge_report(x, list(msgs), strict, g)
                    for e in range(1 << reps):
                        if e == rep.f_bad.value:
                            continue
                        accepting = math.prod(rep.counts[i][(e >> i) & 1] for i in range(reps))
                        assert accepting == 0
                    joint += 1
        notes.update(single_messages=checked, joint_reports=joint)


def test_05_amplification_bound(criterion):
    with criterion(5, "amplification closed-form bound", 120.0) as notes:
        assert amp_success_lower_bound(0.5, 1) == 0.5
        assert amp_success_lower_bound(0.25, 3) == 0.70703125
        gen = np.random.default_rng(5)
        configs = violations = guarantee_violations = 0
        worst_gap = 0.0
        while configs < 60:
            dim = int(gen.integers(2, 65))
            p0, p1 = projector_pair(dim, gen)
            t = float(gen.uniform(0.02, 1.0))
            T = int(gen.integers(1, 13))
            dec = jordan_decompose(p0, p1)
            states = [b.alpha for b in dec.blocks2 if b.p >= t]
            states += [b.vector for b in dec.blocks1 if b.b == 1 and b.c == 1]
            if not states:
                continue
            coeffs = gen.standard_normal(len(states)) + 1j * gen.standard_normal(len(states))
            mix = np.stack(states, axis=1) @ coeffs
            states.append(mix / np.linalg.norm(mix))
            worst = min(amp_success_probability(p0, p1, T, dm(v)) for v in states)
            configs += 1
            gap = amp_success_lower_bound(t, T) - worst
            worst_gap = max(worst_gap, gap)
            violations += gap > 1e-9
            guarantee_violations += worst < amp_success_guarantee(t, T) - 1e-9
        notes.update(configs=configs, closed_form_violations=violations,
                     worst_shortfall=f"{worst_gap:.3g}",
                     uniform_guarantee_violations=guarantee_violations)
        assert guarantee_violations == 0
        assert violations == 0, f"{violations}/{configs} configurations fall below the closed form"


def test_06_jordan_decomposition(criterion):
    with criterion(6, "Jordan decomposition", 60.0) as notes:
        gen = np.random.default_rng(6)
        recon = relations = 0.0
        dims = []
        for i in range(100):
            dim = 64 if i < 5 else int(gen.integers(2, 65))
            dims.append(dim)
            p0, p1 = projector_pair(dim, gen)
            res = jordan_residuals(jordan_decompose(p0, p1), p0, p1)
            recon = max(recon, res["reconstruction"])
            relations = max(relations, max(v for k, v in res.items() if k != "reconstruction"))
        notes.update(pairs=100, max_dim=max(dims), reconstruction=f"{recon:.2e}",
                     relations=f"{relations:.2e}")
        assert recon <= 1e-9
        assert relations <= 1e-8


def test_07_extraction_experiments(criterion):
    with criterion(7, "extraction experiments, delta = 0.3", 600.0) as notes:
        delta = 0.3
        t = delta ** 3 / 64
        worst = oblivious = 0.0
        for seed in range(20):
            gen = np.random.default_rng(700 + seed)
            table = ToyTable.generate(1, 1, BINDING, DeterministicRng(seed))
            if seed % 2:
                adv = random_adversary(table, gen, w_dim=2, out_dim=2)
            else:
                adv = threshold_adversary(table, gen, np.exp(gen.uniform(np.log(t / 20), 0, size=3)))
            worst = max(worst, run_extraction_experiments(adv, delta).td)
        for seed in range(5):
            gen = np.random.default_rng(800 + seed)
            table = ToyTable.generate(1, 1, BINDING, DeterministicRng(seed))
            adv = random_adversary(table, gen, oblivious=True, honest=True)
            oblivious = max(oblivious, run_extraction_experiments(adv, delta).td)
        notes.update(adversaries=20, max_td=f"{worst:.3g}", oblivious_max_td=f"{oblivious:.3g}")
        assert worst <= delta + 0.05
        assert oblivious <= 1e-6


def test_08_superposition_abort_fixture(criterion):
    with criterion(8, "post-extraction fidelity on the superposition-abort fixture", 60.0) as notes:
        fids = []
        for gen in [None] + [np.random.default_rng(s) for s in range(10)]:
            adv, psi_na = superposition_abort_fixture(gen)
            m, rho = ext_run(adv.table, adv.com, adv, adv.rho_st, 0.3)
            assert m is not None
            fids.append(fidelity_pure(psi_na, rho))
        notes.update(fixtures=len(fids), min_fidelity=f"{min(fids):.9f}")
        assert min(fids) >= 0.99


def test_09_watrous_rewinding(criterion):
    with criterion(9, "rewinding", 120.0) as notes:
        gamma = 1e-4
        ratios = []
        for seed in range(10):
            gen = np.random.default_rng(900 + seed)
            proc, rho = random_premise_fixture(gen, gamma=gamma)
            res = rewind_experiment(proc.instrument(), rho, 0.5 - gamma, 0.5, gamma)
            assert res.premises.ok
            assert res.td <= res.bound
            ratios.append(res.td / res.bound)
        gen = np.random.default_rng(9)
        proc = hadamard_procedure(2, 2, gen)
        half = max(rewind_experiment(proc.instrument(), random_density(2, gen), 0.25, 0.5, 1e-6).td
                   for _ in range(5))
        notes.update(fixtures=10, max_td_over_bound=f"{max(ratios):.3g}", half_fixture_td=f"{half:.3g}")
        assert half <= 1e-3


def test_10_mixture_distance_bound(criterion):
    with criterion(10, "mixture distance bound", 60.0) as notes:
        gen = np.random.default_rng(10)
        slack = min(inst.bound - inst.td for inst in
                    (random_mixture_instance(int(gen.integers(2, 9)), gen) for _ in range(100)))
        notes.update(instances=100, min_slack=f"{slack:.3g}")
        assert slack >= -1e-9


def test_11_mini_gk_simulator(criterion):
    with criterion(11, "miniature simulator", 900.0) as notes:
        eps = 0.2
        s = sim_error_budget(eps, 256)
        assert s.delta < eps / 8
        assert eps / 2 + 4 * s.delta < eps
        worst_td = worst_gap = 0.0
        suite = fixture_suite()
        for v in suite:
            res = simulate(v, eps)
            assert res.premises_ok
            gap = abs(res.p_comb - 0.5)
            assert res.td <= eps
            assert gap <= res.schedule.delta / 2 + 0.02
            worst_td, worst_gap = max(worst_td, res.td), max(worst_gap, gap)
        notes.update(fixtures=len(suite), max_td=f"{worst_td:.3g}", max_gap=f"{worst_gap:.3g}",
                     delta=f"{s.delta:.3g}")


def test_12_wipok(criterion):
    with criterion(12, "WIPoK completeness and extraction", 300.0) as notes:
        cfg = WipokConfig(k_reps=4, lam=8)
        runs = 0
        for seed in range(500):
            stmt, wa, wb = toy_statement(seed, n=3 + seed % 2)
            for w in (wa, wb):
                ok, _ = wipok_run(w, stmt, cfg, DeterministicRng(seed).fork("p"),
                                  DeterministicRng(seed).fork("v"))
                assert ok
                runs += 1
        collisions = 0
        for seed in range(50):
            stmt, wa, wb = toy_statement(seed)
            proto = make_protocol(cm.setup(SchemeId.NAOR, 8, DeterministicRng(seed)), cfg.k_reps)
            stmts = stmt.branch_statements()
            g = DeterministicRng(seed).fork("collide")
            for w in (wa, wb):
                a, state = proto.first(stmts, w, g)
                e1 = g.bitvector(cfg.k_reps)
                e2 = e1.flip(g.randbelow(cfg.k_reps))
                found = proto.extract(stmts, a, e1, proto.respond(state, w, e1),
                                      e2, proto.respond(state, w, e2))
                assert found.branch == w.branch and witness_is_valid(stmt, found)
                collisions += 1
        # a prover answering one challenge is accepted with probability 2^-k, which equals the
        # knowledge error; the extractor must then fail every time
        stmt, _, wb = toy_statement(15, table=LINEAR_STRICT)
        g = DeterministicRng(12)
        single_hits = 0
        for run in range(10_000):
            e_star = g.randbelow(1 << cfg.k_reps)
            prover = ResettableProver(stmt, wb, cfg, seed=run, answers=lambda e, s=e_star: e.value == s)
            single_hits += extract_knowledge(prover, stmt, 8, g, cfg).witness is not None
        rep = measure_extraction_exponent(stmt, wb, cfg, [1, 2, 4, 8, 12], 300, 8, seed=12)
        notes.update(completeness_runs=runs, collisions=collisions, single_challenge_runs=10_000,
                     single_challenge_successes=single_hits,
                     acceptance=rep.acceptance, success=rep.success,
                     exponent=f"{rep.exponent:.3f}")
        assert single_hits == 0
        assert all(b >= a for a, b in zip(rep.success, rep.success[1:]))
        assert math.isfinite(rep.exponent) and rep.exponent > 0
        assert BRANCH_A != BRANCH_B


def test_13_golden_determinism(criterion):
    with criterion(13, "golden byte identity", 60.0) as notes:
        mismatched = [name for name, make in sorted(CASES.items())
                      if make() != (GOLDEN / name).read_bytes()]
        notes.update(files=len(CASES), mismatched=mismatched)
        assert not mismatched


def test_abort_rate_tracks_first_bit_bias_at_scale(criterion):
    with criterion(0, "supplementary: abort rate vs first-bit bias, 10^4 runs", 120.0) as notes:
        x = GraphInstance.from_edges(3, [(0, 1), (1, 2), (0, 2)])
        w = CycleWitness((0, 1, 2))
        lam, runs = 6, 10_000
        cfg = ProtocolConfig.proof(lam=lam, lam_reps=1)
        g = DeterministicRng(2025)
        pp_sigma = cm.setup(SchemeId.NAOR, lam, g.fork("pp"))
        bias = first_bit_bias(pp_sigma)
        aborts = 0
        for seed in range(runs):
            V = ScriptedVerifier(x, cfg, g.fork(f"v{seed}"), ABORT_IF_FIRST_BIT, sigma_pp=pp_sigma)
            aborts += run_protocol(x, w, cfg, seed=seed, verifier=V).verdict is Verdict.ABORT
        rate = aborts / runs
        sigma = math.sqrt(bias * (1 - bias) / runs)
        notes.update(rate=rate, bias=bias, z=f"{(rate - bias) / sigma:.2f}")
        assert abs(rate - bias) <= 4 * sigma
