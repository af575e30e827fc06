import itertools

import pytest
from hypothesis import given, settings, strategies as st

from pbmetric.errors import (
    DistanceEvaluationError,
    EmptySampleSet,
    SequenceTooShort,
)
from pbmetric.spaces import (
    PartialBMetricSpace,
    check_b_metric_axioms,
    check_cauchy_numeric,
    check_convergence,
    check_pbm_axioms,
    pbm_equal,
    pbm_equal_defect,
    sample_carrier,
)


def max_space(s=1.0):
    return PartialBMetricSpace.from_text("[0, inf)", "max(x, y)", s)


def abs_space():
    return PartialBMetricSpace.from_text("(-inf, inf)", "abs(x - y)", 1.0)


def by_id(reports):
    return {r.axiom_id: r for r in reports}


# --- partial b-metric axioms -----------------------------------------------------


def test_max_metric_passes_all_axioms():
    reports = check_pbm_axioms(max_space(), [0.0, 1.0, 2.0, 5.0, 8.0])
    assert all(r.verdict == "pass" for r in reports)
    assert all(not r.witnesses for r in reports)


def test_plain_metric_is_partial_b_metric():
    # abs-diff: all axioms hold and the self-distance is zero
    space = abs_space()
    reports = check_pbm_axioms(space, [0.0, 1.0, 2.0])
    assert all(r.verdict == "pass" for r in reports)
    for x in (0.0, 1.0, 2.0):
        assert space.pd(x, x) == 0.0
    b_reports = check_b_metric_axioms(space, [0.0, 1.0, 3.0])
    assert all(r.verdict == "pass" for r in b_reports)


def test_clamped_max_metric_breaks_indistinguishability():
    # pd(x,y) = max(max(x,y) - 1, 0) on {0, 0.5, 2}: brute force over all
    # pairs/triples shows the failing axiom is P1 (0 and 0.5 become
    # indistinguishable); the small-self-distance, symmetry and triangle
    # axioms all hold on this sample.
    space = PartialBMetricSpace.from_text("[0, inf)", "max(max(x, y) - 1, 0)")
    samples = [0.0, 0.5, 2.0]

    def pd(a, b):
        return max(max(a, b) - 1.0, 0.0)

    # independent brute-force oracle
    p1_bad = [
        (x, y)
        for x, y in itertools.product(samples, samples)
        if x != y and pd(x, x) == pd(x, y) == pd(y, y)
    ]
    assert (0.0, 0.5) in p1_bad
    p2_bad = [
        (x, y) for x, y in itertools.product(samples, samples)
        if pd(x, x) > pd(x, y) + 1e-9
    ]
    p4_bad = [
        (x, z, y)
        for x, z, y in itertools.product(samples, samples, samples)
        if pd(x, y) > pd(x, z) + pd(z, y) - pd(z, z) + 1e-9
    ]
    assert not p2_bad and not p4_bad

    reports = by_id(check_pbm_axioms(space, samples))
    assert reports["P1-indistinguishability"].verdict == "fail"
    witness_pairs = {tuple(w.points) for w in
                     reports["P1-indistinguishability"].witnesses}
    assert (0.0, 0.5) in witness_pairs
    assert reports["P2-small-self-distance"].verdict == "pass"
    assert reports["P3-symmetry"].verdict == "pass"
    assert reports["P4-modified-triangle"].verdict == "pass"


def test_witnesses_reproduce_reported_gap():
    space = PartialBMetricSpace.from_text("[0, inf)", "(x - y)^2", 1.0)
    reports = by_id(check_pbm_axioms(space, [0.0, 1.0, 2.0, 4.0]))
    report = reports["P4-modified-triangle"]
    assert report.verdict == "fail"
    for w in report.witnesses:
        x, z, y = w.points
        lhs = space.pd(x, y)
        rhs = 1.0 * (space.pd(x, z) + space.pd(z, y)) - space.pd(z, z)
        assert lhs == pytest.approx(w.lhs, rel=1e-12)
        assert rhs == pytest.approx(w.rhs, rel=1e-12)
        assert lhs - rhs == pytest.approx(w.gap, rel=1e-12)


def test_empty_samples_rejected():
    with pytest.raises(EmptySampleSet):
        check_pbm_axioms(max_space(), [])


def test_distance_evaluation_error_wrapped():
    space = PartialBMetricSpace.from_text("[0, inf)", "log(x - y)")
    with pytest.raises(DistanceEvaluationError):
        check_pbm_axioms(space, [0.0, 1.0])


# --- b-metric axioms ---------------------------------------------------------------


def test_max_metric_is_not_a_b_metric():
    reports = by_id(check_b_metric_axioms(max_space(), [1.0, 2.0, 3.0]))
    assert reports["B1-identity"].verdict == "fail"
    points = {w.points[0] for w in reports["B1-identity"].witnesses}
    assert 1.0 in points  # pd(1,1) = 1 != 0
    assert reports["B2-symmetry"].verdict == "pass"


def test_squared_difference_is_b_metric_with_s_2():
    space = PartialBMetricSpace.from_text("[0, inf)", "(x - y)^2", 2.0)
    samples = [0.0, 1.0, 2.0, 4.0]
    reports = check_b_metric_axioms(space, samples)
    assert all(r.verdict == "pass" for r in reports)
    # with s = 1 the triangle fails; brute-force oracle pins a witness
    space1 = PartialBMetricSpace.from_text("[0, inf)", "(x - y)^2", 1.0)
    reports1 = by_id(check_b_metric_axioms(space1, samples))
    assert reports1["B3-relaxed-triangle"].verdict == "fail"


def test_s_coeff_below_one_rejected():
    with pytest.raises(ValueError):
        PartialBMetricSpace.from_text("[0, 1]", "abs(x - y)", 0.5)


# --- distance-based equality -------------------------------------------------------


def test_pbm_equal_cases():
    space = max_space()
    assert pbm_equal(space, 3.0, 3.0)
    assert not pbm_equal(space, 3.0, 5.0)  # pd(3,3)=3 != 5
    assert pbm_equal(space, 0.0, 0.0)
    assert pbm_equal_defect(space, 3.0, 5.0) == 2.0


@settings(max_examples=50, derandomize=True, deadline=None)
@given(st.floats(min_value=0.0, max_value=1e6, allow_nan=False))
def test_pbm_equal_reflexive(x):
    assert pbm_equal(max_space(), x, x)


@settings(max_examples=50, derandomize=True, deadline=None)
@given(
    st.floats(min_value=0.0, max_value=1e6, allow_nan=False),
    st.floats(min_value=0.0, max_value=1e6, allow_nan=False),
)
def test_pbm_equal_symmetric(x, y):
    space = max_space()
    assert pbm_equal(space, x, y) == pbm_equal(space, y, x)


@settings(max_examples=40, derandomize=True, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1e9, allow_nan=False),
                min_size=1, max_size=12))
def test_max_metric_passes_on_any_nonnegative_sample(samples):
    reports = check_pbm_axioms(max_space(), samples)
    assert all(r.verdict == "pass" for r in reports)


# --- sequence diagnostics ----------------------------------------------------------


def test_convergence_to_zero():
    space = max_space()
    seq = [8.0] + [0.0] * 15
    verdict = check_convergence(space, seq, 0.0)
    assert verdict.converged
    assert verdict.tail_discrepancy == 0.0
    assert verdict.self_distance == 0.0


def test_constant_sequence_converges_to_itself():
    space = max_space()
    verdict = check_convergence(space, [3.0] * 12, 3.0)
    assert verdict.converged
    assert verdict.self_distance == 3.0


def test_wrong_limit_fails():
    verdict = check_convergence(max_space(), [1.0] * 12, 0.0)
    assert not verdict.converged
    assert verdict.tail_discrepancy == 1.0


def test_sequence_too_short():
    with pytest.raises(SequenceTooShort):
        check_convergence(max_space(), [0.0, 0.0], 0.0, window=8)
    with pytest.raises(SequenceTooShort):
        check_cauchy_numeric(max_space(), [0.0] * 5, window=8)


def test_cauchy_verdicts():
    space = max_space()
    settled = [8.0] + [0.0] * 15
    verdict = check_cauchy_numeric(space, settled)
    assert verdict.is_cauchy
    assert verdict.limit_estimate == 0.0

    alternating = [float(i % 2) for i in range(16)]
    verdict = check_cauchy_numeric(space, alternating)
    assert not verdict.is_cauchy
    assert verdict.spread == 1.0

    constant = [5.0] * 16
    verdict = check_cauchy_numeric(space, constant)
    assert verdict.is_cauchy
    assert verdict.limit_estimate == 5.0  # pd(c, c) = c for the max metric


# --- sampling ------------------------------------------------------------------------


def test_sample_carrier_is_deterministic_and_inside():
    space = max_space()
    a = sample_carrier(space.carrier, 0.0, 100.0, 101, 16, seed=0,
                       extra=(2.0, 8.0))
    b = sample_carrier(space.carrier, 0.0, 100.0, 101, 16, seed=0,
                       extra=(2.0, 8.0))
    assert a == b
    assert all(space.contains(x) for x in a)
    assert 2.0 in a and 8.0 in a and 0.0 in a
    c = sample_carrier(space.carrier, 0.0, 100.0, 101, 16, seed=1)
    assert a != c


def test_sample_carrier_respects_interval_union():
    carrier = PartialBMetricSpace.from_text("[0, 1] or [5, 6]",
                                            "abs(x - y)").carrier
    points = sample_carrier(carrier, 0.0, 10.0, 51, 8, seed=3)
    assert all(carrier.contains(p) for p in points)
    assert any(p <= 1.0 for p in points) and any(5.0 <= p <= 6.0 for p in points)
