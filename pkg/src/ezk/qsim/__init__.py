"""Exact small-dimension quantum simulation of the extraction and simulation machinery."""

from .amp import (AmpBranch, AmpUnitary, amp_branches, amp_failure, amp_rounds_for, amp_run,
                  amp_success_guarantee, amp_success_lower_bound, amp_success_probability,
                  amp_unitary)
from .ensemble import CQEnsemble, ensemble_distance
from .extraction import (STAT_BINDING, STRONG_CB, ExperimentResult, ExtParams, ToyAdversary,
                         build_open_projector, ext_kraus, ext_outcomes, ext_run, opener_layout,
                         random_adversary, run_extraction_experiments, superposition_abort_fixture,
                         threshold_adversary)
from .fixtures import load_fixture, save_fixture
from .jordan import JordanDecomposition, jordan_decompose, jordan_residuals, threshold_split
from .layout import RegisterLayout
from .mixture import mixture_distance_bound, random_mixture_instance
from .linalg import fidelity_pure, trace_distance
from .minigk import (MiniVerifier, SimSchedule, fixture_suite, mini_gk_real, mini_gk_sim,
                     sim_error_budget, simulate)
from .oracle import UnitaryOracle
from .watrous import (Instrument, PremiseReport, check_premises, rewind, rewind_experiment,
                      rewind_explicit, rewind_td_bound)

watrous_rewind = rewind

__all__ = [
    "amp_branches",
    "amp_failure",
    "amp_rounds_for",
    "amp_run",
    "amp_success_guarantee",
    "amp_success_lower_bound",
    "amp_success_probability",
    "amp_unitary",
    "AmpBranch",
    "AmpUnitary",
    "build_open_projector",
    "check_premises",
    "CQEnsemble",
    "ensemble_distance",
    "ExperimentResult",
    "ext_kraus",
    "ext_outcomes",
    "ext_run",
    "ExtParams",
    "fidelity_pure",
    "fixture_suite",
    "Instrument",
    "jordan_decompose",
    "jordan_residuals",
    "JordanDecomposition",
    "load_fixture",
    "mini_gk_real",
    "mini_gk_sim",
    "MiniVerifier",
    "mixture_distance_bound",
    "opener_layout",
    "PremiseReport",
    "random_adversary",
    "random_mixture_instance",
    "RegisterLayout",
    "rewind",
    "rewind_experiment",
    "rewind_explicit",
    "rewind_td_bound",
    "run_extraction_experiments",
    "save_fixture",
    "sim_error_budget",
    "SimSchedule",
    "simulate",
    "STAT_BINDING",
    "STRONG_CB",
    "superposition_abort_fixture",
    "threshold_adversary",
    "threshold_split",
    "ToyAdversary",
    "trace_distance",
    "UnitaryOracle",
    "watrous_rewind",
]
