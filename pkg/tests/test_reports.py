import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ezk.bench import bench_run, byte_scaling, predicted_slope
from ezk.protocol import ProtocolConfig
from ezk.qsim import amp_success_lower_bound, minigk
from ezk.qsim.reports import (amp_half_example, amp_report, canonical, dumps, extract_report,
                              make_report, rewind_report, simulate_report)

from schema_helpers import validate

finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6)


def test_amp_report_spot_value():
    rep = amp_report(0.25, 3)
    validate(rep, "qsim_report")
    assert rep["measured"]["bound"] == 0.70703125
    assert rep["params"] == {"t": 0.25, "T": 3, "delta": None, "epsilon": None}
    assert rep["pass"]


def test_half_overlap_three_rounds():
    assert amp_half_example(3) == pytest.approx(0.875, abs=1e-12)
    assert amp_success_lower_bound(0.5, 3) == 0.875


@pytest.mark.parametrize("report", [
    extract_report(0.3, 1),
    rewind_report(1e-6, 2),
    simulate_report(minigk.honest_verifier(), 0.2),
], ids=["extract", "rewind", "simulate"])
def test_reports_match_schema(report):
    validate(report, "qsim_report")
    validate(canonical(report), "qsim_report")


@settings(max_examples=200, deadline=None)
@given(x=finite, y=finite)
def test_canonical_is_idempotent_and_close(x, y):
    rep = make_report("f", [2], t=x, success_prob=y, td=abs(y), passed=True)
    once = canonical(rep)
    assert canonical(once) == once
    assert once["params"]["t"] == pytest.approx(x, rel=1e-11, abs=0)
    assert once["measured"]["success_prob"] == pytest.approx(y, rel=1e-11, abs=1e-12)


def test_canonical_clears_measured_noise_only():
    rep = make_report("f", [2], t=1e-20, td=3e-17, bound=0.123456789012345, passed=True)
    out = canonical(rep)
    assert out["params"]["t"] == 1e-20
    assert out["measured"]["td"] == 0.0
    assert out["measured"]["bound"] == 0.123456789012
    assert dumps(out) == dumps(canonical(out))
    assert " " not in dumps(out)


def test_bench_message_counts():
    proof = bench_run(ProtocolConfig.proof(lam=8, lam_reps=2), n=4, runs=3).to_json()
    arg = bench_run(ProtocolConfig.argument(lam=8, lam_reps=2, wipok_reps=2), n=4, runs=2).to_json()
    for rep, msgs, runs in ((proof, 5, 3), (arg, 9, 2)):
        validate(rep, "bench_report")
        assert rep["messages"] == msgs
        assert rep["accepted"] == runs
        assert sum(rep["bytes_per_type"].values()) == pytest.approx(rep["bytes_mean"])


def test_byte_slope_matches_prediction():
    rep = byte_scaling(runs=6)
    assert rep.predicted_slope == predicted_slope(ProtocolConfig.proof(lam=16))
    assert rep.relative_error <= 0.10
    assert all(math.isfinite(b) for _, _, b in rep.points)
