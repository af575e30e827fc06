import math

import pytest

from pbmetric.contraction import (
    GridSpec,
    Scenario,
    Toolkit,
    check_cyclic_admissible,
    check_range_inclusion,
    check_self_maps,
    check_sequential_closure,
    check_tac_at,
    check_v0_gate,
    gate,
    grid_axis_values,
    make_cyclic_preset,
    make_weak_contraction_preset,
    n_s,
    verify_tac_grid,
    with_cclass,
)
from pbmetric.errors import EmptyGrid, EmptyIntersection
from pbmetric.expressions import parse_expression
from pbmetric.function_classes import (
    CClassFunction,
    cclass_half,
    omega_log3,
    xi_identity,
)
from pbmetric.scenarios import bundled_scenario_file
from pbmetric.spaces import PartialBMetricSpace


@pytest.fixture(scope="module")
def ex26():
    return bundled_scenario_file("example-2-6").build()


@pytest.fixture(scope="module")
def ex22():
    return bundled_scenario_file("example-2-2").build()


def identity_scenario(distance="abs(x - y)"):
    z = parse_expression("z", 1)
    one = parse_expression("1", 1)
    return Scenario(
        name="identity",
        space=PartialBMetricSpace.from_text("[0, inf)", distance),
        map_h=z, map_eta=z, map_Q=z, map_Z=z,
        gamma_adm=one, delta_adm=one,
        xi=xi_identity(), omega=omega_log3(), cclass=cclass_half(),
        preimage_Q=z, preimage_Z=z,
        declared_closed_ranges=frozenset({"h"}),
    )


# --- N_s and the gate ---------------------------------------------------------


def test_n_s_values(ex26):
    # Qw=32, Zz=8, hw=8, eta z=0: max{32, 32, 8, (32+8)/2} = 32
    assert n_s(ex26, 8.0, 2.0) == 32.0
    assert n_s(ex26, 0.0, 0.0) == 0.0


def test_n_s_identity_maps_reduces_to_distance():
    scenario = identity_scenario()
    for w, z in [(0.0, 1.0), (2.0, 5.0), (7.0, 7.0)]:
        assert n_s(scenario, w, z) == abs(w - z)
    metric_max = identity_scenario("max(x, y)")
    assert n_s(metric_max, 3.0, 5.0) == 5.0


def test_n_s_dominates_each_term(ex26):
    for w in (0.0, 2.0, 8.0, 31.5, 64.0, 99.0):
        for z in (0.0, 1.0, 2.0, 63.5, 64.0, 90.0):
            value = n_s(ex26, w, z)
            assert value >= ex26.pd(ex26.Q(w), ex26.Z(z))
            assert value >= ex26.pd(ex26.h(w), ex26.Q(w))
            assert value >= ex26.pd(ex26.Z(z), ex26.eta(z))


def test_gate_truth_table(ex26):
    # direct evaluation oracle: gamma(Q(8)) = gamma(32) = 2 (32 is outside
    # the open branch), delta(Z(2)) = delta(8) = 1
    assert ex26.gamma(ex26.Q(8.0)) == 2.0
    assert ex26.delta(ex26.Z(2.0)) == 1.0
    assert gate(ex26, 8.0, 2.0)
    # gamma(Q(4)) = gamma(8) = sqrt(8)/(16 sqrt 2) = 1/8 and
    # delta(Z(1)) = delta(1) = 1/4, so the product is 1/32 < 1
    assert ex26.gamma(ex26.Q(4.0)) == pytest.approx(0.125, abs=1e-15)
    assert ex26.delta(ex26.Z(1.0)) == 0.25
    assert not gate(ex26, 4.0, 1.0)
    # the "otherwise" branches at the origin: gamma(0) = 2, delta(0) = 1
    assert gate(ex26, 0.0, 0.0)


def test_gate_region(ex26):
    # gate on iff w in {0} u [8, inf) and z in {0} u [2, inf)
    for w, z, expected in [
        (8.0, 2.0, True), (100.0, 0.0, True), (0.0, 50.0, True),
        (7.999, 2.0, False), (8.0, 1.999, False), (4.0, 1.0, False),
        (0.5, 0.5, False),
    ]:
        assert gate(ex26, w, z) is expected


# --- the per-pair contraction check ----------------------------------------------


def test_tac_at_gated_pair(ex26):
    result = check_tac_at(ex26, 8.0, 2.0)
    assert result.kind == "satisfied"
    assert result.lhs == 8.0
    assert result.rhs == 16.0
    assert result.margin == 8.0


def test_tac_at_fixed_point_margin_zero(ex26):
    result = check_tac_at(ex26, 0.0, 0.0)
    assert result.kind == "satisfied"
    assert result.lhs == 0.0 and result.rhs == 0.0 and result.margin == 0.0


def test_tac_at_vacuous_iff_gate_off(ex26):
    assert check_tac_at(ex26, 4.0, 1.0).kind == "vacuous"
    for w, z in [(0.0, 0.0), (8.0, 2.0), (7.0, 1.0), (64.0, 64.0)]:
        assert (check_tac_at(ex26, w, z).kind == "vacuous") == (
            not gate(ex26, w, z))


# --- grid verification -------------------------------------------------------------


def test_grid_axis_includes_breakpoints(ex26):
    axis = grid_axis_values(ex26, (0.0, 100.0, 0.64))
    for b in (2.0, 8.0, 32.0, 64.0):
        assert b in axis
    assert all(0.0 <= v <= 100.0 for v in axis)


def test_verify_tac_grid_passes(ex26):
    report = verify_tac_grid(ex26, GridSpec.square(0.0, 20.0, 0.5))
    assert report.verdict == "pass"
    assert report.counts["violated"] == 0
    assert report.counts["satisfied"] > 0
    assert report.worst_margin == 0.0  # equality at the origin pair


def test_grid_matches_per_pair_checks(ex26):
    # the grid aggregation must agree with check_tac_at pair by pair
    spec = GridSpec.square(0.0, 12.0, 1.0)
    axis = grid_axis_values(ex26, spec.w_axis)
    report = verify_tac_grid(ex26, spec)
    kinds = [check_tac_at(ex26, w, z).kind for w in axis for z in axis]
    assert report.counts["satisfied"] == kinds.count("satisfied")
    assert report.counts["vacuous"] == kinds.count("vacuous")
    assert report.counts["violated"] == kinds.count("violated")


def test_grid_subset_monotonicity(ex26):
    # passing on a grid implies passing on any subgrid
    big = verify_tac_grid(ex26, GridSpec.square(0.0, 40.0, 0.5))
    small = verify_tac_grid(ex26, GridSpec.square(0.0, 40.0, 1.0))
    assert big.verdict == "pass"
    assert small.verdict == "pass"
    assert small.counts["satisfied"] <= big.counts["satisfied"]


def test_workers_do_not_change_the_report(ex26):
    spec = GridSpec.square(0.0, 30.0, 1.0)
    serial = verify_tac_grid(ex26, spec, workers=1)
    parallel = verify_tac_grid(ex26, spec, workers=2)
    assert serial.to_dict() == parallel.to_dict()


def test_identity_in_t_cclass_shows_no_grid_violation(ex26):
    # replacing H by H(t, z) = t cannot break this scenario's inequality:
    # under the max distance N_s dominates both max(w, .) terms, so
    # lhs <= N_s holds everywhere; exhaustive evaluation confirms it
    h_id = CClassFunction(parse_expression("x", 2), preset="custom")
    variant = with_cclass(ex26, h_id)
    report = verify_tac_grid(variant, GridSpec.square(0.0, 40.0, 0.5))
    assert report.counts["violated"] == 0
    assert report.verdict == "pass"


def test_grid_off_carrier_rejected(ex26):
    scenario = make_cyclic_preset(
        "[0, 1]", "[0, 1]", "z / 2", "z / 2",
        Toolkit(xi_identity(), omega_log3(), cclass_half()),
    )
    with pytest.raises(EmptyGrid):
        verify_tac_grid(scenario, GridSpec.square(5.0, 6.0, 0.5))


def test_all_vacuous_grid_is_flagged(ex26):
    zero = parse_expression("0", 1)
    dead = Scenario(
        name="dead-gate",
        space=ex26.space,
        map_h=ex26.map_h, map_eta=ex26.map_eta,
        map_Q=ex26.map_Q, map_Z=ex26.map_Z,
        gamma_adm=zero, delta_adm=zero,
        xi=ex26.xi, omega=ex26.omega, cclass=ex26.cclass,
        preimage_Q=ex26.preimage_Q, preimage_Z=ex26.preimage_Z,
    )
    report = verify_tac_grid(dead, GridSpec.square(0.0, 10.0, 1.0))
    assert report.verdict == "vacuous"
    assert report.counts["satisfied"] == 0
    assert "vacuous" in report.notes


# --- cyclic admissibility ------------------------------------------------------------


def test_cyclic_admissible_bundled(ex26):
    report = check_cyclic_admissible(
        ex26, [0.0, 2.0, 4.0, 8.0, 16.0, 64.0, 100.0])
    assert report.verdict == "pass"
    assert report.counts["violated"] == 0


def test_zero_admissibility_is_vacuous(ex26):
    zero = parse_expression("0", 1)
    dead = Scenario(
        name="dead", space=ex26.space,
        map_h=ex26.map_h, map_eta=ex26.map_eta,
        map_Q=ex26.map_Q, map_Z=ex26.map_Z,
        gamma_adm=zero, delta_adm=zero,
        xi=ex26.xi, omega=ex26.omega, cclass=ex26.cclass,
    )
    report = check_cyclic_admissible(dead, [0.0, 1.0, 5.0])
    assert report.verdict == "vacuous"


def test_broken_cyclic_inclusion_fails():
    # indicator pair for disjoint C = [0,1], D = [2,3] with h = identity:
    # gamma(Qw) = 1 on C but delta(hw) = indicator_D(w) = 0 there
    ind_c = parse_expression("piecewise(z in [0, 1]: 1; otherwise: 0)", 1)
    ind_d = parse_expression("piecewise(z in [2, 3]: 1; otherwise: 0)", 1)
    z = parse_expression("z", 1)
    broken = Scenario(
        name="broken",
        space=PartialBMetricSpace.from_text("[0, 3]", "max(x, y)"),
        map_h=z, map_eta=z, map_Q=z, map_Z=z,
        gamma_adm=ind_c, delta_adm=ind_d,
        xi=xi_identity(), omega=omega_log3(), cclass=cclass_half(),
    )
    report = check_cyclic_admissible(broken, [0.0, 0.5, 1.0, 2.5])
    assert report.verdict == "fail"
    witness_points = {w.points[0] for w in report.witnesses}
    assert 0.5 in witness_points


# --- range inclusion ----------------------------------------------------------------


def test_range_inclusion_bundled(ex26):
    report = check_range_inclusion(ex26, [0.0, 1.0, 8.0, 27.0, 100.0])
    assert report.verdict == "pass"


def test_range_inclusion_without_inverses(ex26):
    # force the bisection path by dropping the inverse expressions
    stripped = Scenario(
        name="no-inverse", space=ex26.space,
        map_h=ex26.map_h, map_eta=ex26.map_eta,
        map_Q=ex26.map_Q, map_Z=ex26.map_Z,
        gamma_adm=ex26.gamma_adm, delta_adm=ex26.delta_adm,
        xi=ex26.xi, omega=ex26.omega, cclass=ex26.cclass,
    )
    report = check_range_inclusion(stripped, [0.0, 1.0, 8.0, 100.0], 1e-9)
    assert report.verdict == "pass"


def test_range_inclusion_shifted_map_fails():
    # h(w) = w + 1 with Z = identity on [0, 1]: value 1.5 has no preimage
    z = parse_expression("z", 1)
    shifted = Scenario(
        name="shifted",
        space=PartialBMetricSpace.from_text("[0, 1]", "abs(x - y)"),
        map_h=parse_expression("z + 1", 1), map_eta=z, map_Q=z, map_Z=z,
        gamma_adm=parse_expression("1", 1),
        delta_adm=parse_expression("1", 1),
        xi=xi_identity(), omega=omega_log3(), cclass=cclass_half(),
    )
    report = check_range_inclusion(shifted, [0.0, 0.5, 1.0])
    assert report.verdict == "fail"
    assert any(w.points == (0.5,) for w in report.witnesses)


# --- remaining hypothesis checks ------------------------------------------------------


def test_sequential_closure_bundled(ex26):
    samples = [0.0, 1.0, 2.0, 8.0, 16.0, 32.0, 33.0, 64.0, 100.0]
    report = check_sequential_closure(ex26, samples)
    assert report.verdict in ("pass", "vacuous")
    assert report.counts["violated"] == 0


def test_v0_gate_semantics(ex26):
    assert check_v0_gate(ex26, [0.0, 8.0, 100.0]).verdict == "pass"
    assert check_v0_gate(ex26, [4.0]).verdict == "vacuous"  # existence unresolved


def test_self_maps_stay_inside(ex26):
    report = check_self_maps(ex26, [0.0, 1.0, 8.0, 64.0, 100.0])
    assert report.verdict == "pass"
    escaping = Scenario(
        name="escape",
        space=PartialBMetricSpace.from_text("[0, 1]", "abs(x - y)"),
        map_h=parse_expression("z + 2", 1),
        map_eta=parse_expression("z", 1),
        map_Q=parse_expression("z", 1),
        map_Z=parse_expression("z", 1),
        gamma_adm=parse_expression("1", 1),
        delta_adm=parse_expression("1", 1),
        xi=xi_identity(), omega=omega_log3(), cclass=cclass_half(),
    )
    assert check_self_maps(escaping, [0.0, 0.5]).verdict == "fail"


# --- presets ---------------------------------------------------------------------------


def test_cyclic_preset_basics():
    toolkit = Toolkit(xi_identity(), omega_log3(), cclass_half())
    scenario = make_cyclic_preset("[0, 1]", "[0, 1]", "z / 2", "z / 2", toolkit)
    # Q = Z = identity, gate always on inside C x D
    assert scenario.Q(0.7) == 0.7 and scenario.Z(0.3) == 0.3
    assert gate(scenario, 0.5, 0.5)
    assert check_cyclic_admissible(scenario, [0.0, 0.25, 1.0]).verdict == "pass"
    report = verify_tac_grid(scenario, GridSpec.square(0.0, 1.0, 0.05))
    assert report.verdict == "pass"


def test_cyclic_preset_gate_is_c_cross_d():
    toolkit = Toolkit(xi_identity(), omega_log3(), cclass_half())
    scenario = make_cyclic_preset("[0, 2]", "[1, 3]", "z / 2 + 1", "z / 2",
                                  toolkit)
    assert gate(scenario, 0.5, 1.5)  # w in C, z in D
    assert not gate(scenario, 2.5, 1.5)  # w outside C
    assert not gate(scenario, 0.5, 0.5)  # z outside D


def test_cyclic_preset_admissibility_mirrors_inclusions():
    # when hC ⊆ D and eta D ⊆ C on the samples, the preset is admissible
    toolkit = Toolkit(xi_identity(), omega_log3(), cclass_half())
    scenario = make_cyclic_preset("[0, 2]", "[1, 3]", "z / 2 + 1", "z / 2",
                                  toolkit)
    report = check_cyclic_admissible(scenario, [0.0, 0.5, 1.0, 1.5, 2.0, 3.0])
    assert report.verdict == "pass"


def test_disjoint_preset_raises():
    toolkit = Toolkit(xi_identity(), omega_log3(), cclass_half())
    with pytest.raises(EmptyIntersection):
        make_cyclic_preset("[0, 1]", "[2, 3]", "z", "z", toolkit)


def test_weak_contraction_toolkit():
    toolkit = make_weak_contraction_preset(xi_identity(), omega_log3())
    H = toolkit.cclass
    assert H(5.0, 2.0) == 3.0
    assert H(2.0, 5.0) == 0.0
    assert H(7.0, 0.0) == 7.0
    # the admissibility pair is constant 1: the gate is always on
    from pbmetric.expressions import eval_expr
    assert eval_expr(toolkit.gamma, 123.0) == 1.0
    assert eval_expr(toolkit.delta, 0.0) == 1.0
