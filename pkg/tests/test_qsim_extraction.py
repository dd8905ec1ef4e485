import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ezk.commitments import ToyTable
from ezk.commitments.toytable import BINDING
from ezk.errors import InvalidArgument
from ezk.primitives import DeterministicRng
from ezk.qsim import (STAT_BINDING, STRONG_CB, ExtParams, ToyAdversary, UnitaryOracle, amp_unitary,
                      build_open_projector, ext_kraus, ext_outcomes, ext_run, fidelity_pure,
                      opener_layout, random_adversary, run_extraction_experiments,
                      superposition_abort_fixture, threshold_adversary)
from ezk.qsim.amp import DEFAULT_EPS_AMP
from ezk.qsim.extraction import _reference_success_kraus, success_kraus_general
from ezk.qsim.linalg import dm, random_density, random_unitary

from qsim_helpers import projector_pair

STRICT_TABLE = ToyTable(1, 1, (0, 1, 2, 3))
seeds = st.integers(0, 2**32 - 1)


def binding_table(seed=0):
    return ToyTable.generate(1, 1, BINDING, DeterministicRng(seed))


def classical_opener(table, com, st_dim=2, rho=None):
    """Swaps |0,0> and the unique valid (m, r) on the message registers, for every ST."""
    (m, r), = table.openings(com)
    lay = opener_layout(st_dim, table)
    dmr = table.n_messages * table.n_rand
    perm = np.eye(dmr)
    a, b = 0, m * table.n_rand + r
    perm[[a, b]] = perm[[b, a]]
    u = np.kron(np.eye(st_dim), perm)
    rho = random_density(st_dim, np.random.default_rng(1)) if rho is None else rho
    assert lay.dim == u.shape[0]
    return ToyAdversary(table, com, rho, u), m


# --- the open projector -------------------------------------------------------------------

def test_identity_opener_projector_is_the_test_projector():
    table = STRICT_TABLE
    com = table.lookup(1, 0)
    lay = opener_layout(2, table, w_dim=2, out_dim=2)
    pi = build_open_projector(table, com, UnitaryOracle(np.eye(lay.dim)), lay)
    mr = np.zeros((4, 4))
    mr[1 * 2 + 0, 1 * 2 + 0] = 1
    assert np.allclose(pi, lay.embed(["M", "R"], mr))
    # rank = dim * (#valid) / (|M| |R|)
    assert round(np.trace(pi).real) == lay.dim * 1 // 4


def test_open_projector_rejects_non_unitary():
    lay = opener_layout(2, STRICT_TABLE)
    with pytest.raises(InvalidArgument):
        build_open_projector(STRICT_TABLE, 0, np.eye(lay.dim) * 2, lay)
    with pytest.raises(InvalidArgument):
        build_open_projector(STRICT_TABLE, 0, UnitaryOracle(np.eye(4)), lay)


@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_open_projector_idempotent_and_born_rule(seed):
    gen = np.random.default_rng(seed)
    table = binding_table(seed % 7)
    com = table.table[int(gen.integers(4))]
    lay = opener_layout(2, table, w_dim=2)
    u = random_unitary(lay.dim, gen)
    pi = build_open_projector(table, com, UnitaryOracle(u), lay)
    assert np.abs(pi @ pi - pi).max() <= 1e-10
    assert np.abs(pi - pi.conj().T).max() <= 1e-10
    # run the opener directly and add up the probability of valid (m, r)
    psi = gen.normal(size=2) + 1j * gen.normal(size=2)
    psi /= np.linalg.norm(psi)
    start = np.zeros(lay.dim, dtype=complex)
    start[np.arange(2) * (lay.dim // 2)] = psi
    out = (u @ start).reshape(lay.dims)
    p_valid = sum(np.sum(np.abs(out[:, :, m, r, :]) ** 2) for m, r in table.openings(com))
    assert np.vdot(start, pi @ start).real == pytest.approx(p_valid, abs=1e-10)


def test_oracle_hides_the_matrix_and_counts_queries():
    adv, _ = classical_opener(STRICT_TABLE, 3)
    oracle = adv.oracle()
    assert not hasattr(oracle, "__dict__")
    assert not any(hasattr(oracle, name) for name in ("matrix", "u", "U"))
    oracle.apply(np.eye(oracle.dim))
    oracle.apply_adjoint(np.eye(oracle.dim))
    assert oracle.queries == 2


# --- the extractor --------------------------------------------------------------------------

def test_params_follow_the_threshold_schedule():
    p = ExtParams.make(0.3)
    assert p.t == pytest.approx(0.3 ** 3 / 64)
    assert p.eps_amp == DEFAULT_EPS_AMP
    with pytest.raises(InvalidArgument):
        ExtParams.make(2.0 ** -11)
    with pytest.raises(InvalidArgument):
        ExtParams.make(0.3, variant="other")


@pytest.mark.parametrize("variant", [STAT_BINDING, STRONG_CB])
def test_classical_valid_opener_is_extracted_without_disturbance(variant):
    com = STRICT_TABLE.lookup(1, 1)
    adv, m = classical_opener(STRICT_TABLE, com)
    params = ExtParams.make(0.3, variant)
    parts, bottom = ext_outcomes(adv.table, com, adv.oracle(), adv.layout, adv.rho_st, params)
    key = m if variant == STAT_BINDING else (1, 1)
    assert set(parts) == {key}
    assert np.trace(parts[key]).real >= 1 - params.eps_amp
    assert bottom <= params.eps_amp
    got, rho_ext = ext_run(adv.table, com, adv, adv.rho_st, 0.3, variant)
    assert got == key
    w, v = np.linalg.eigh(adv.rho_st)
    # the dominant eigenvector keeps its weight
    assert np.abs(rho_ext - adv.rho_st).max() <= 1e-6
    assert fidelity_pure(v[:, -1], rho_ext) == pytest.approx(w[-1], abs=1e-6)


def test_opener_that_never_opens_yields_bottom():
    table = STRICT_TABLE
    com = table.lookup(1, 1)
    # the identity opener leaves M R at |0,0>, which opens a different commitment
    lay = opener_layout(2, table)
    adv = ToyAdversary(table, com, random_density(2, np.random.default_rng(0)), np.eye(lay.dim))
    params = ExtParams.make(0.3)
    parts, bottom = ext_outcomes(table, com, adv.oracle(), lay, adv.rho_st, params)
    assert bottom >= 1 - params.eps_amp
    assert ext_run(table, com, adv, adv.rho_st, 0.3) == (None, None)


def test_superposition_abort_fixture_collapses_to_non_aborting_state():
    for gen in (None, np.random.default_rng(5)):
        adv, psi_na = superposition_abort_fixture(gen)
        m, rho_ext = ext_run(adv.table, adv.com, adv, adv.rho_st, 0.3)
        assert m == 0
        assert fidelity_pure(psi_na, rho_ext) >= 0.99


def coherent_kraus(adv: ToyAdversary, params: ExtParams) -> dict:
    """Extractor effect per outcome from the purified amplification unitary."""
    lay = adv.layout
    oracle = adv.oracle()
    st_dim = lay.dims[0]
    dy = lay.dim // st_dim
    iso = np.zeros((lay.dim, st_dim), dtype=complex)
    iso[np.arange(st_dim) * dy, np.arange(st_dim)] = 1
    pi = build_open_projector(adv.table, adv.com, oracle, lay)
    amp = amp_unitary(iso @ iso.conj().T, pi, params.T)
    n_anc = amp.dim // (lay.dim * 2)
    start = np.stack([amp.embed_input(iso[:, s]) for s in range(st_dim)], axis=1)
    after = amp.apply(start)
    b1 = np.diag([0.0, 1.0])
    out = {}
    valid = adv.table.openings(adv.com)
    keys = sorted({m for m, _ in valid}) if params.variant == STAT_BINDING else sorted(valid)
    for key in keys:
        if params.variant == STAT_BINDING:
            proj = lay.basis_projector("M", key)
        else:
            proj = lay.basis_projector("M", key[0]) @ lay.basis_projector("R", key[1])
        q = oracle.conjugate(proj)
        big = np.kron(np.kron(q, b1), np.eye(n_anc))
        out[key] = after.conj().T @ big @ after
    return out


@settings(max_examples=12, deadline=None)
@given(seed=seeds, variant=st.sampled_from([STAT_BINDING, STRONG_CB]), T=st.integers(1, 3),
       family=st.sampled_from(["haar", "threshold"]))
def test_extractor_effects_match_coherent_unitary(seed, variant, T, family):
    gen = np.random.default_rng(seed)
    table = binding_table(seed % 5)
    if family == "haar":
        adv = random_adversary(table, gen, w_dim=1)
    else:
        adv = threshold_adversary(table, gen, gen.random(2), w_dim=1)
    params = ExtParams(0.3, 0.3 ** 3 / 64, T, DEFAULT_EPS_AMP, variant)
    oracle = coherent_kraus(adv, params)
    for method in ("general", "auto"):
        got = ext_kraus(table, adv.com, adv.oracle(), adv.layout, params, method=method)
        assert set(got) == set(oracle)
        for k in oracle:
            assert np.abs(got[k] - oracle[k]).max() <= 1e-9


@settings(max_examples=15, deadline=None)
@given(seed=seeds, T=st.integers(1, 40))
def test_series_matches_direct_iteration(seed, T):
    gen = np.random.default_rng(seed)
    dim = 6
    p0, p1 = projector_pair(dim, gen)
    q = dm(gen.normal(size=dim) + 1j * gen.normal(size=dim))
    q /= np.trace(q).real
    fast = success_kraus_general(p0, p1, q, T)
    assert np.abs(fast - _reference_success_kraus(p0, p1, q, T)).max() <= 1e-9


def test_closed_form_refused_when_openings_disagree():
    table = binding_table(0)
    multi = next(c for c in table.values() if len(table.openings(c)) > 1)
    gen = np.random.default_rng(0)
    adv = random_adversary(table, gen, com=multi)
    params = ExtParams.make(0.3, STRONG_CB)
    with pytest.raises(InvalidArgument):
        ext_kraus(table, multi, adv.oracle(), adv.layout, params, method="closed")


# --- extraction experiments -----------------------------------------------------------------

def test_experiments_refuse_non_binding_tables():
    table = ToyTable.one_time_pad(1)
    adv = random_adversary(table, np.random.default_rng(0))
    with pytest.raises(InvalidArgument):
        run_extraction_experiments(adv, 0.3)


@pytest.mark.parametrize("seed", range(4))
def test_state_oblivious_honest_opener_is_indistinguishable(seed):
    gen = np.random.default_rng(seed)
    adv = random_adversary(binding_table(seed), gen, oblivious=True, honest=True)
    res = run_extraction_experiments(adv, 0.3)
    assert res.td <= 1e-6
    assert res.real.total == pytest.approx(1, abs=1e-9)
    assert res.ext.total == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("family", ["haar", "threshold"])
def test_random_adversaries_within_delta(seed, family):
    gen = np.random.default_rng(100 + seed)
    table = binding_table(seed)
    if family == "haar":
        adv = random_adversary(table, gen, w_dim=2, out_dim=2)
    else:
        t = 0.3 ** 3 / 64
        adv = threshold_adversary(table, gen, np.exp(gen.uniform(np.log(t / 20), 0, size=3)))
    res = run_extraction_experiments(adv, 0.3)
    assert res.td <= 0.3 + 0.05
