import pytest

from pbmetric.errors import SequenceTooShort, UnsortedSamples
from pbmetric.expressions import parse_expression
from pbmetric.function_classes import (
    CClassFunction,
    OmegaOneFunction,
    XiFunction,
    cclass_half,
    cclass_truncated_difference,
    check_cclass,
    check_omega1,
    check_xi,
    default_probe_sequences,
    omega_log3,
    xi_identity,
)


def xi_of(text):
    return XiFunction(parse_expression(text, 1))


def omega_of(text):
    return OmegaOneFunction(parse_expression(text, 1))


def H_of(text):
    return CClassFunction(parse_expression(text, 2))


# --- altering-distance class -----------------------------------------------------


def test_identity_passes():
    report = check_xi(xi_identity(), [0.0, 0.5, 1.0, 32.0])
    assert report.verdict == "pass"


def test_identity_passes_on_any_sorted_sample():
    for samples in ([0.0], [0.0, 1e-6, 2.0, 7.5, 1e4], [0.0, 0.1]):
        assert check_xi(xi_identity(), samples).verdict == "pass"


def test_constant_zero_fails():
    report = check_xi(xi_of("0"), [0.0, 1.0, 2.0])
    assert report.verdict == "fail"
    assert any("positive away from 0" in w.note for w in report.witnesses)


def test_square_passes():
    assert check_xi(xi_of("z^2"), [0.0, 1.0, 2.0, 4.0]).verdict == "pass"


def test_decreasing_fails_monotonicity():
    report = check_xi(xi_of("max(4 - z, 0) + z / 100"), [0.0, 1.0, 2.0])
    assert report.verdict == "fail"


def test_nonvanishing_at_zero_fails():
    report = check_xi(xi_of("z + 1"), [0.0, 1.0])
    assert report.verdict == "fail"


def test_jump_discontinuity_caught_at_sampled_point():
    step = xi_of("piecewise(z in [0, 1): z; otherwise: z + 5)")
    report = check_xi(step, [0.0, 0.5, 1.0, 2.0])
    assert report.verdict == "fail"
    assert any("continuity" in w.note for w in report.witnesses)


def test_unsorted_samples_rejected():
    with pytest.raises(UnsortedSamples):
        check_xi(xi_identity(), [0.0, 2.0, 1.0])
    with pytest.raises(UnsortedSamples):
        check_xi(xi_identity(), [1.0, 2.0])  # missing 0


# --- C-class ------------------------------------------------------------------------


def test_half_preset_passes():
    report = check_cclass(cclass_half(), [(0.0, 0.0), (1.0, 3.0), (32.0, 2.0)])
    assert report.verdict == "pass"
    # H(t,z) = t/2 equals t only at t = 0, so no equality witnesses ever
    report = check_cclass(cclass_half(),
                          [(t / 7.0, z / 3.0) for t in range(20) for z in range(8)])
    assert report.verdict == "pass"


def test_truncated_difference_preset():
    H = cclass_truncated_difference()
    assert H(5.0, 2.0) == 3.0
    assert H(2.0, 5.0) == 0.0
    for t in (0.0, 1.0, 7.5):
        assert H(t, 0.0) == t  # allowed: the exceptional case z = 0
    report = check_cclass(H, [(5.0, 2.0), (2.0, 5.0), (3.0, 0.0), (0.0, 0.0)])
    assert report.verdict == "pass"


def test_sum_violates_dominance():
    report = check_cclass(H_of("x + y"), [(1.0, 1.0)])
    assert report.verdict == "fail"
    w = report.witnesses[0]
    assert w.lhs == 2.0 and w.rhs == 1.0


def test_identity_in_t_fails_equality_condition():
    report = check_cclass(H_of("x"), [(2.0, 3.0), (0.0, 1.0), (4.0, 0.0)])
    assert report.verdict == "fail"
    assert any("both arguments positive" in w.note for w in report.witnesses)
    # but the pairs with a zero coordinate are fine
    assert report.counts["satisfied"] == 2


def test_negative_H_rejected():
    report = check_cclass(H_of("x - y"), [(1.0, 5.0)])
    assert report.verdict == "fail"
    assert any("nonnegative" in w.note for w in report.witnesses)


# --- vanishing-control class ------------------------------------------------------


def test_log3_passes_default_probes():
    report = check_omega1(omega_log3())
    assert report.verdict == "pass"
    # probe 1 + 1/n stays near 1; omega tail stays near log(4) > 0
    assert report.worst_margin is not None and report.worst_margin > 0.1


def test_identity_omega_passes():
    assert check_omega1(omega_of("z")).verdict == "pass"


def test_constant_zero_omega_fails():
    report = check_omega1(omega_of("0"), [[1.0] * 32])
    assert report.verdict == "fail"
    assert any("bounded away" in w.note for w in report.witnesses)


def test_vanishing_probe_imposes_nothing():
    # on a probe that itself vanishes, any omega is consistent
    report = check_omega1(omega_of("0"), [[2.0 ** -k for k in range(1, 33)]])
    assert report.counts["violated"] == 0


def test_short_probe_rejected():
    with pytest.raises(SequenceTooShort):
        check_omega1(omega_log3(), [[1.0] * 8])


def test_default_probes_cover_regimes():
    probes = default_probe_sequences()
    assert len(probes) >= 6
    assert all(len(p) >= 16 for p in probes)
    assert any(min(p[len(p) // 2:]) > 0.1 for p in probes)  # bounded away
    assert any(min(p[len(p) // 2:]) < 1e-8 for p in probes)  # vanishing
