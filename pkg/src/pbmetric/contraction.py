"""The gated four-map contraction and its hypothesis checks.

A scenario bundles a partial b-metric space, four self-maps h, eta, Q, Z,
an admissibility pair (gamma, delta) and a toolkit (xi, omega, H).  The
contraction condition states: whenever the gate

    gamma(Q w) * delta(Z z) >= 1

holds (an exact comparison — the gate is a logical hypothesis, not a
numeric estimate), the inequality

    xi(s^3 * pd(h w, eta z)) <= H(xi(N_s(w, z)), omega(N_s(w, z)))

must hold, where N_s is the maximum of four distance expressions::

    N_s(w, z) = max{ pd(Qw, Zz), pd(hw, Qw), pd(Zz, eta z),
                     (pd(Qw, eta z) + pd(hw, Zz)) / (2 s) }

Pairs failing the gate are vacuously compliant; reports count them so an
all-vacuous "pass" is visible for what it is.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, replace

import numpy as np

from .errors import EmptyGrid, EmptyIntersection, PreimageSolverUnavailable
from .expressions import (
    Expr,
    Num,
    Var,
    eval_expr,
    parse_expression,
    piecewise_breakpoints,
)
from .function_classes import (
    CClassFunction,
    OmegaOneFunction,
    XiFunction,
    cclass_truncated_difference,
)
from .intervals import IntervalUnion, parse_interval_union
from .numerics import DEFAULT_TOL, close, slack
from .reports import WITNESS_CAP, ComplianceReport, Witness, make_report
from .rootfind import solve_preimage
from .spaces import PartialBMetricSpace
from . import expressions as ex

MAP_NAMES = ("h", "eta", "Q", "Z")


@dataclass(frozen=True)
class Toolkit:
    """The (xi, omega, H) triple; presets may pin the admissibility pair."""

    xi: XiFunction
    omega: OmegaOneFunction
    cclass: CClassFunction
    gamma: Expr | None = None
    delta: Expr | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    space: PartialBMetricSpace
    map_h: Expr
    map_eta: Expr
    map_Q: Expr
    map_Z: Expr
    gamma_adm: Expr
    delta_adm: Expr
    xi: XiFunction
    omega: OmegaOneFunction
    cclass: CClassFunction
    declared_closed_ranges: frozenset = frozenset()
    preimage_Q: Expr | None = None
    preimage_Z: Expr | None = None

    def __post_init__(self):
        bad = set(self.declared_closed_ranges) - set(MAP_NAMES)
        if bad:
            raise ValueError(f"unknown closed-range names: {sorted(bad)}")

    # evaluation helpers ------------------------------------------------------

    def h(self, x: float) -> float:
        return eval_expr(self.map_h, x)

    def eta(self, x: float) -> float:
        return eval_expr(self.map_eta, x)

    def Q(self, x: float) -> float:
        return eval_expr(self.map_Q, x)

    def Z(self, x: float) -> float:
        return eval_expr(self.map_Z, x)

    def gamma(self, x: float) -> float:
        return eval_expr(self.gamma_adm, x)

    def delta(self, x: float) -> float:
        return eval_expr(self.delta_adm, x)

    def pd(self, x: float, y: float) -> float:
        return self.space.pd(x, y)

    def map_by_name(self, name: str):
        return {
            "h": self.map_h, "eta": self.map_eta,
            "Q": self.map_Q, "Z": self.map_Z,
        }[name]

    def breakpoints(self) -> list:
        """Finite piecewise breakpoints of every map, the admissibility
        pair and the distance."""
        found: set[float] = set()
        for node in (self.map_h, self.map_eta, self.map_Q, self.map_Z,
                     self.gamma_adm, self.delta_adm, self.space.distance):
            found.update(piecewise_breakpoints(node))
        return sorted(found)

    def gate_switch_points(self) -> list:
        """Carrier points where the gate factors can switch: admissibility
        breakpoints pulled back through Q and Z (best effort)."""
        points: set[float] = set()
        jobs = [(self.gamma_adm, self.map_Q, self.preimage_Q),
                (self.delta_adm, self.map_Z, self.preimage_Z)]
        for adm, fwd, inv in jobs:
            for b in piecewise_breakpoints(adm):
                try:
                    points.add(solve_preimage(fwd, b, self.space.carrier, inv))
                except PreimageSolverUnavailable:
                    continue
        return sorted(points)


# --- core contraction quantities ------------------------------------------------


def n_s(scenario: Scenario, w: float, z: float) -> float:
    """Maximum of the four distance expressions entering the contraction."""
    pd = scenario.pd
    qw, zz = scenario.Q(w), scenario.Z(z)
    hw, ez = scenario.h(w), scenario.eta(z)
    s = scenario.space.s_coeff
    return max(
        pd(qw, zz),
        pd(hw, qw),
        pd(zz, ez),
        (pd(qw, ez) + pd(hw, zz)) / (2.0 * s),
    )


def gate(scenario: Scenario, w: float, z: float) -> bool:
    """Exact admissibility gate: gamma(Qw) * delta(Zz) >= 1."""
    return scenario.gamma(scenario.Q(w)) * scenario.delta(scenario.Z(z)) >= 1.0


@dataclass(frozen=True)
class TacCheck:
    kind: str  # "vacuous" | "satisfied" | "violated"
    lhs: float | None = None
    rhs: float | None = None
    margin: float | None = None


def check_tac_at(scenario: Scenario, w: float, z: float,
                 tol: float = DEFAULT_TOL) -> TacCheck:
    """Check the contraction inequality at one pair.

    Vacuous exactly when the gate is off; otherwise satisfied iff
    lhs <= rhs within scale-aware slack, with margin rhs - lhs."""
    if not gate(scenario, w, z):
        return TacCheck("vacuous")
    s = scenario.space.s_coeff
    lhs = scenario.xi(s ** 3 * scenario.pd(scenario.h(w), scenario.eta(z)))
    big_n = n_s(scenario, w, z)
    rhs = scenario.cclass(scenario.xi(big_n), scenario.omega(big_n))
    margin = rhs - lhs
    kind = "satisfied" if lhs <= rhs + slack(lhs, rhs, tol) else "violated"
    return TacCheck(kind, lhs, rhs, margin)


# --- grids ------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Axis specs (lo, hi, step) for the w and z axes."""

    w_axis: tuple
    z_axis: tuple
    include_breakpoints: bool = True

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse "lo:hi:step" (both axes) or "spec,spec" (w-axis, z-axis)."""
        parts = [p.strip() for p in text.split(",")]
        axes = []
        for part in parts:
            bits = part.split(":")
            if len(bits) != 3:
                raise ValueError(f"grid spec must be lo:hi:step, got {part!r}")
            lo, hi, step = (float(b) for b in bits)
            if step <= 0 or hi < lo:
                raise ValueError(f"bad grid spec {part!r}")
            axes.append((lo, hi, step))
        if len(axes) == 1:
            axes.append(axes[0])
        if len(axes) != 2:
            raise ValueError("grid spec takes at most two axes")
        return cls(axes[0], axes[1])

    @classmethod
    def square(cls, lo: float, hi: float, step: float) -> "GridSpec":
        return cls((lo, hi, step), (lo, hi, step))


def grid_axis_values(scenario: Scenario, axis, include_breakpoints=True) -> list:
    """Uniform axis values intersected with the carrier, plus piecewise
    breakpoints and gate-switch preimages (violations concentrate there)."""
    lo, hi, step = axis
    count = int(round((hi - lo) / step))
    values = {float(v) for v in np.linspace(lo, hi, count + 1)}
    if include_breakpoints:
        values.update(b for b in scenario.breakpoints() if lo <= b <= hi)
        values.update(p for p in scenario.gate_switch_points() if lo <= p <= hi)
    return sorted(v for v in values if scenario.space.contains(v))


def _tac_row(scenario, w, z_values, tol):
    satisfied = vacuous = violated = 0
    worst = None
    witnesses = []
    for z in z_values:
        result = check_tac_at(scenario, w, z, tol)
        if result.kind == "vacuous":
            vacuous += 1
            continue
        if worst is None or result.margin < worst:
            worst = result.margin
        if result.kind == "satisfied":
            satisfied += 1
        else:
            violated += 1
            if len(witnesses) < WITNESS_CAP:
                witnesses.append(Witness((w, z), result.lhs, result.rhs,
                                         result.lhs - result.rhs))
    return satisfied, vacuous, violated, worst, witnesses


def _tac_rows(scenario, w_values, z_values, tol):
    totals = [0, 0, 0]
    worst = None
    witnesses = []
    for w in w_values:
        s, v, x, row_worst, row_wit = _tac_row(scenario, w, z_values, tol)
        totals[0] += s
        totals[1] += v
        totals[2] += x
        if row_worst is not None and (worst is None or row_worst < worst):
            worst = row_worst
        witnesses.extend(row_wit)
    return totals, worst, witnesses


def verify_tac_grid(scenario: Scenario, grid_spec: GridSpec,
                    tol: float = DEFAULT_TOL, workers: int = 1) -> ComplianceReport:
    """Aggregate the per-pair contraction check over a finite grid.

    Results are identical for any worker count: chunks are merged by
    summing counts, taking the minimum margin, and sorting witnesses
    lexicographically by (w, z) before capping."""
    w_values = grid_axis_values(scenario, grid_spec.w_axis,
                                grid_spec.include_breakpoints)
    z_values = grid_axis_values(scenario, grid_spec.z_axis,
                                grid_spec.include_breakpoints)
    if not w_values or not z_values:
        raise EmptyGrid("grid does not intersect the carrier")

    if workers <= 1 or len(w_values) < 4:
        totals, worst, witnesses = _tac_rows(scenario, w_values, z_values, tol)
    else:
        workers = min(workers, len(w_values))
        chunks = [list(c) for c in np.array_split(w_values, workers)]
        totals = [0, 0, 0]
        worst = None
        witnesses = []
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_tac_rows, scenario, chunk, z_values, tol)
                       for chunk in chunks]
            for fut in futures:
                part_totals, part_worst, part_wit = fut.result()
                for i in range(3):
                    totals[i] += part_totals[i]
                if part_worst is not None and (worst is None or part_worst < worst):
                    worst = part_worst
                witnesses.extend(part_wit)

    notes = f"grid {len(w_values)}x{len(z_values)}"
    if totals[0] + totals[2] == 0:
        notes += "; all pairs vacuous (gate never fired)"
    return make_report("tac-contraction-grid", totals[0], totals[1], totals[2],
                       worst, witnesses, notes=notes)


# --- hypothesis checks ----------------------------------------------------------


def check_cyclic_admissible(scenario: Scenario, samples,
                            tol: float = DEFAULT_TOL) -> ComplianceReport:
    """Cyclic admissibility of (h, eta) with respect to (Q, Z):
    gamma(Qw) >= 1 forces delta(hw) >= 1, and delta(Zw) >= 1 forces
    gamma(eta w) >= 1.  Comparisons are exact, like the gate."""
    satisfied = vacuous = violated = 0
    witnesses = []
    worst = None
    for w in samples:
        w = float(w)
        triggered = False
        if scenario.gamma(scenario.Q(w)) >= 1.0:
            triggered = True
            value = scenario.delta(scenario.h(w))
            if worst is None or value - 1.0 < worst:
                worst = value - 1.0
            if value >= 1.0:
                satisfied += 1
            else:
                violated += 1
                witnesses.append(Witness((w,), value, 1.0, 1.0 - value,
                                         "gamma(Qw) >= 1 but delta(hw) < 1"))
        if scenario.delta(scenario.Z(w)) >= 1.0:
            triggered = True
            value = scenario.gamma(scenario.eta(w))
            if worst is None or value - 1.0 < worst:
                worst = value - 1.0
            if value >= 1.0:
                satisfied += 1
            else:
                violated += 1
                witnesses.append(Witness((w,), value, 1.0, 1.0 - value,
                                         "delta(Zw) >= 1 but gamma(eta w) < 1"))
        if not triggered:
            vacuous += 1
    return make_report("cyclic-admissibility", satisfied, vacuous, violated,
                       worst, witnesses)


def check_range_inclusion(scenario: Scenario, samples,
                          membership_tol: float = DEFAULT_TOL) -> ComplianceReport:
    """Constructive range inclusions: every sampled h-value must have a
    Z-preimage in the carrier, every eta-value a Q-preimage.  A sample
    whose preimage search fails is a witness (the value is uncovered)."""
    satisfied = violated = 0
    witnesses = []
    jobs = (
        ("h into Z-range", scenario.map_h, scenario.map_Z, scenario.preimage_Z),
        ("eta into Q-range", scenario.map_eta, scenario.map_Q, scenario.preimage_Q),
    )
    for label, fwd, covering, inv in jobs:
        for w in samples:
            w = float(w)
            target = eval_expr(fwd, w)
            try:
                x = solve_preimage(covering, target, scenario.space.carrier,
                                   inv, membership_tol)
            except PreimageSolverUnavailable as exc:
                violated += 1
                witnesses.append(Witness((w,), target, target, 0.0,
                                         f"{label}: {exc}"))
                continue
            value = eval_expr(covering, x)
            if close(value, target, membership_tol) and scenario.space.contains(
                x, membership_tol * max(1.0, abs(x))
            ):
                satisfied += 1
            else:
                violated += 1
                witnesses.append(Witness((w,), value, target,
                                         abs(value - target),
                                         f"{label}: preimage off target"))
    if satisfied + violated == 0:
        raise PreimageSolverUnavailable("no sample could be attempted")
    return make_report("range-inclusion", satisfied, 0, violated, None, witnesses)


def check_sequential_closure(scenario: Scenario, samples,
                             tol: float = DEFAULT_TOL,
                             seq_len: int = 24) -> ComplianceReport:
    """Sampled closure of the admissibility super-level sets: generated
    sequences staying in {gamma >= 1} ∩ {delta >= 1} must have their limit
    inside too.  Sequences are geometric approaches limit + (start-limit)/2^n."""
    in_set = [float(x) for x in samples
              if scenario.gamma(float(x)) >= 1.0 and scenario.delta(float(x)) >= 1.0]
    satisfied = vacuous = violated = 0
    witnesses = []
    if not in_set:
        return make_report("sequential-closure", 0, len(list(samples)), 0, None,
                           [], notes="no sampled point lies in both super-level sets")
    starts = sorted({in_set[0], in_set[len(in_set) // 2], in_set[-1]})
    for limit in samples:
        limit = float(limit)
        for start in starts:
            if start == limit:
                continue
            terms = [limit + (start - limit) * 2.0 ** -n
                     for n in range(1, seq_len + 1)]
            inside = all(
                scenario.space.contains(t)
                and scenario.gamma(t) >= 1.0 and scenario.delta(t) >= 1.0
                for t in terms
            )
            if not inside:
                vacuous += 1
                continue
            g, d = scenario.gamma(limit), scenario.delta(limit)
            if g >= 1.0 and d >= 1.0:
                satisfied += 1
            else:
                violated += 1
                witnesses.append(Witness((start, limit), min(g, d), 1.0,
                                         1.0 - min(g, d),
                                         "limit escapes the super-level sets"))
    return make_report("sequential-closure", satisfied, vacuous, violated,
                       None, witnesses)


def check_v0_gate(scenario: Scenario, candidates) -> ComplianceReport:
    """Existence of a starting point: some v0 with gamma(Q v0) >= 1 and
    delta(Z v0) >= 1.

    The hypothesis is existential, so sampling can confirm it (witness
    found) but never refute it; with no passing candidate the verdict is
    vacuous, not fail."""
    satisfied = skipped = 0
    total = 0
    for v0 in candidates:
        v0 = float(v0)
        total += 1
        g = scenario.gamma(scenario.Q(v0))
        d = scenario.delta(scenario.Z(v0))
        if g >= 1.0 and d >= 1.0:
            satisfied += 1
        else:
            skipped += 1
    if satisfied > 0:
        return make_report("v0-gate", satisfied, skipped, 0, None, [],
                           notes=f"{satisfied} of {total} candidates admissible")
    return make_report("v0-gate", 0, max(skipped, 1), 0, None, [],
                       notes="no candidate passes the starting gate; "
                             "existence unresolved on these samples")


def check_self_maps(scenario: Scenario, samples,
                    tol: float = DEFAULT_TOL) -> ComplianceReport:
    """All four maps must send sampled carrier points into the carrier."""
    satisfied = violated = 0
    witnesses = []
    for name in MAP_NAMES:
        ast = scenario.map_by_name(name)
        for w in samples:
            w = float(w)
            value = eval_expr(ast, w)
            if scenario.space.contains(value, tol * max(1.0, abs(value))):
                satisfied += 1
            else:
                violated += 1
                witnesses.append(Witness((w,), value, value, 0.0,
                                         f"{name}({w}) leaves the carrier"))
    return make_report("self-maps", satisfied, 0, violated, None, witnesses)


# --- presets ---------------------------------------------------------------------


def _indicator(union: IntervalUnion) -> Expr:
    var = Var("z", 0)
    return ex.Piecewise(
        (ex.Branch(var, union, Num(1.0)),),
        Num(0.0),
    )


def make_cyclic_preset(
    C,
    D,
    h,
    eta,
    toolkit: Toolkit,
    distance: str | Expr = "max(x, y)",
    s_coeff: float = 1.0,
    declared_complete: bool = True,
    name: str = "cyclic-preset",
) -> Scenario:
    """Scenario for a cyclic pair on C ∪ D: Q = Z = identity, gamma and
    delta the indicators of C and D.  Requires C ∩ D nonempty — the
    common fixed point is promised inside the intersection."""
    if isinstance(C, str):
        C = parse_interval_union(C)
    if isinstance(D, str):
        D = parse_interval_union(D)
    if C.intersection(D) is None:
        raise EmptyIntersection("C and D must intersect")
    if isinstance(h, str):
        h = parse_expression(h, 1)
    if isinstance(eta, str):
        eta = parse_expression(eta, 1)
    if isinstance(distance, str):
        distance = parse_expression(distance, 2)
    carrier = IntervalUnion.union_of(C, D)
    identity = Var("z", 0)
    return Scenario(
        name=name,
        space=PartialBMetricSpace(carrier, distance, s_coeff, declared_complete),
        map_h=h,
        map_eta=eta,
        map_Q=identity,
        map_Z=identity,
        gamma_adm=_indicator(C.normalized()),
        delta_adm=_indicator(D.normalized()),
        xi=toolkit.xi,
        omega=toolkit.omega,
        cclass=toolkit.cclass,
        declared_closed_ranges=frozenset({"Q", "Z"}),
        preimage_Q=identity,
        preimage_Z=identity,
    )


def make_weak_contraction_preset(xi: XiFunction,
                                 omega: OmegaOneFunction) -> Toolkit:
    """Toolkit for the subtractive contraction form
    xi(pd) <= xi(N_s) - omega(N_s): H is the truncated difference and the
    admissibility pair is constant 1 (the gate is always on)."""
    return Toolkit(
        xi=xi,
        omega=omega,
        cclass=cclass_truncated_difference(),
        gamma=Num(1.0),
        delta=Num(1.0),
    )


def with_cclass(scenario: Scenario, cclass: CClassFunction) -> Scenario:
    """Scenario with a replaced C-class function (handy for negative
    controls)."""
    return replace(scenario, cclass=cclass)
