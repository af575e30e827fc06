"""Constructive fixed-point machinery for a scenario.

The iteration interleaves two sequences: a pre-sequence v_0, v_1, ... and
the driven sequence d_m defined by

    d_{2m}   = h(v_{2m})   = Z(v_{2m+1})
    d_{2m+1} = eta(v_{2m+1}) = Q(v_{2m+2})

so each step needs a preimage under Z (even steps) or Q (odd steps),
realized by ``solve_preimage``.  The stopping rule follows the proven
step-distance decay: pd(d_m, d_{m+1}) -> 0, so the trace converges when a
streak of consecutive step distances stays below tolerance.  Note the
limit certificate does NOT require pd(d_m, d) -> 0: in a partial b-metric
the self-distance pd(d, d) may be positive, and convergence means
pd(d_m, d) -> pd(d, d).

Coincidence search, weak-compatibility checking and common-fixed-point
certification all compare points with the distance-based equality of the
space (``pbm_equal``), whose defect vanishes exactly when two points are
indistinguishable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .contraction import Scenario
from .errors import EmptyGrid, NotConverged, PreimageSolverUnavailable
from .expressions import Expr, eval_expr
from .numerics import DEFAULT_TOL, slack
from .reports import ComplianceReport, Witness, make_report
from .rootfind import solve_preimage
from .spaces import (
    CauchyVerdict,
    ConvergenceVerdict,
    PartialBMetricSpace,
    check_cauchy_numeric,
    check_convergence,
    pbm_equal,
    pbm_equal_defect,
)

CONVERGENCE_STREAK = 5
MAP_LABELS = ("h", "eta", "Q", "Z")


# --- iteration -------------------------------------------------------------


@dataclass
class IterationTrace:
    v_points: list = field(default_factory=list)
    d_points: list = field(default_factory=list)
    step_distances: list = field(default_factory=list)
    gate_flags: list = field(default_factory=list)  # parallel to d_points
    preimage_residuals: list = field(default_factory=list)
    status: str = "max_iters"  # "converged" | "max_iters" | "preimage_failure"
    failure_index: int | None = None
    limit: float | None = None

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def all_gates_held(self) -> bool:
        return all(self.gate_flags)

    def summary(self) -> dict:
        return {
            "v0": self.v_points[0] if self.v_points else None,
            "iterations": len(self.d_points),
            "status": self.status,
            "limit": self.limit,
            "failure_index": self.failure_index,
            "max_preimage_residual": (
                max(self.preimage_residuals) if self.preimage_residuals else 0.0
            ),
            "final_step_distance": (
                self.step_distances[-1] if self.step_distances else None
            ),
        }


def build_sequence(
    scenario: Scenario,
    v0: float,
    max_iters: int = 10000,
    tol: float = DEFAULT_TOL,
    preimage_tol: float = DEFAULT_TOL,
    streak: int = CONVERGENCE_STREAK,
) -> IterationTrace:
    """Run the interleaved iteration from v0.

    Even d-entries come from h, odd ones from eta; v-entries alternate
    between Z- and Q-preimages of the last d-entry.  Gate flags record,
    per d-index, whether the relevant admissibility factor was >= 1.
    Stops after ``streak`` consecutive step distances <= tol, at
    max_iters, or at a preimage failure (partial trace returned)."""
    if not scenario.space.contains(v0, DEFAULT_TOL):
        raise ValueError(f"v0={v0} is outside the carrier")
    trace = IterationTrace(v_points=[float(v0)])
    carrier = scenario.space.carrier

    def push_d(value: float, flag: bool):
        if trace.d_points:
            trace.step_distances.append(scenario.pd(trace.d_points[-1], value))
        trace.d_points.append(value)
        trace.gate_flags.append(flag)

    def converged() -> bool:
        tail = trace.step_distances[-streak:]
        return len(tail) == streak and all(d <= tol for d in tail)

    def preimage(fwd: Expr, inv: Expr | None, target: float) -> float:
        x = solve_preimage(fwd, target, carrier, inv, preimage_tol)
        trace.preimage_residuals.append(abs(eval_expr(fwd, x) - target))
        return x

    while len(trace.d_points) < max_iters:
        v_even = trace.v_points[-1]
        flag = scenario.gamma(scenario.Q(v_even)) >= 1.0
        push_d(scenario.h(v_even), flag)
        if converged():
            break
        try:
            v_odd = preimage(scenario.map_Z, scenario.preimage_Z,
                             trace.d_points[-1])
        except PreimageSolverUnavailable:
            trace.status = "preimage_failure"
            trace.failure_index = len(trace.d_points)
            return trace
        trace.v_points.append(v_odd)

        if len(trace.d_points) >= max_iters:
            break
        flag = scenario.delta(scenario.Z(v_odd)) >= 1.0
        push_d(scenario.eta(v_odd), flag)
        if converged():
            break
        try:
            v_even = preimage(scenario.map_Q, scenario.preimage_Q,
                              trace.d_points[-1])
        except PreimageSolverUnavailable:
            trace.status = "preimage_failure"
            trace.failure_index = len(trace.d_points)
            return trace
        trace.v_points.append(v_even)

    if converged():
        trace.status = "converged"
        trace.limit = trace.d_points[-1]
    return trace


@dataclass
class LimitCertificate:
    limit: float
    convergence: ConvergenceVerdict
    cauchy: CauchyVerdict

    @property
    def certified(self) -> bool:
        return self.convergence.converged and self.cauchy.is_cauchy

    def to_dict(self) -> dict:
        return {
            "limit": self.limit,
            "certified": self.certified,
            "convergence": self.convergence.to_dict(),
            "cauchy": self.cauchy.to_dict(),
        }


def detect_limit(trace: IterationTrace, space: PartialBMetricSpace,
                 tol: float = DEFAULT_TOL) -> LimitCertificate:
    """Limit of a converged trace plus diagnostics: the d-sequence must
    converge to it in the partial-b sense and be numerically Cauchy."""
    if not trace.converged:
        raise NotConverged(f"trace status is {trace.status!r}")
    d = trace.limit
    window = max(2, min(8, len(trace.d_points) // 2))
    convergence = check_convergence(space, trace.d_points, d, tol, window)
    cauchy = check_cauchy_numeric(space, trace.d_points, tol, window)
    return LimitCertificate(d, convergence, cauchy)


def check_step_monotonicity(trace: IterationTrace, space: PartialBMetricSpace,
                            tol: float = DEFAULT_TOL) -> bool:
    """Even-step distance decrease along a trace:
    pd(d_{2m}, d_{2m+1}) <= pd(d_{2m}, d_{2m-1}) for every m >= 1."""
    d = trace.d_points
    for m in range(1, (len(d) - 1) // 2 + 1):
        i = 2 * m
        if i + 1 >= len(d):
            break
        lhs = space.pd(d[i], d[i + 1])
        rhs = space.pd(d[i], d[i - 1])
        if lhs > rhs + slack(lhs, rhs, tol):
            return False
    return True


# --- coincidence points ------------------------------------------------------


@dataclass
class CoincidenceSet:
    pair_id: str
    points: list
    residuals: list  # distance-equality defect per point; 0 = indistinguishable

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "points": list(self.points),
            "residuals": list(self.residuals),
        }


def _bisect_residual(r, lo: float, hi: float) -> float:
    r_lo = r(lo)
    if r_lo == 0.0:
        return lo
    rising = r_lo < 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        val = r(mid)
        if val == 0.0:
            return mid
        if (val < 0.0) == rising:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_coincidence_points(
    space: PartialBMetricSpace,
    f: Expr,
    g: Expr,
    search_grid,
    tol: float = DEFAULT_TOL,
    pair_id: str = "(f,g)",
) -> CoincidenceSet:
    """Points where f and g agree (distance-based equality), from direct
    grid hits plus sign-change bisection on the residual f - g between
    adjacent grid points.  Tangential coincidences that never change sign
    are found only when a grid point lands within tolerance."""
    grid = sorted(float(x) for x in search_grid)
    if not grid:
        raise EmptyGrid("coincidence search needs a nonempty grid")

    def residual(x: float) -> float:
        return eval_expr(f, x) - eval_expr(g, x)

    candidates = []
    values = [residual(x) for x in grid]
    for x in grid:
        if pbm_equal(space, eval_expr(f, x), eval_expr(g, x), tol):
            candidates.append(x)
    for (x0, r0), (x1, r1) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if r0 == 0.0 or r1 == 0.0:
            continue  # exact zeros are grid hits already
        if (r0 < 0.0) != (r1 < 0.0):
            root = _bisect_residual(residual, x0, x1)
            if pbm_equal(space, eval_expr(f, root), eval_expr(g, root), tol):
                candidates.append(root)

    points: list[float] = []
    residuals: list[float] = []
    for x in sorted(candidates):
        if points and abs(x - points[-1]) <= slack(x, points[-1], tol):
            continue  # cluster duplicates from hit + refinement
        points.append(x)
        residuals.append(pbm_equal_defect(space, eval_expr(f, x), eval_expr(g, x)))
    return CoincidenceSet(pair_id, points, residuals)


def check_weak_compatibility(
    space: PartialBMetricSpace,
    f: Expr,
    g: Expr,
    coincidence_points,
    tol: float = DEFAULT_TOL,
    pair_id: str = "(f,g)",
) -> ComplianceReport:
    """The pair must commute at each coincidence point: f(g(x)) equals
    g(f(x)) in the distance sense.  An empty set passes vacuously."""
    points = [float(x) for x in coincidence_points]
    satisfied = violated = 0
    witnesses = []
    for x in points:
        fg = eval_expr(f, eval_expr(g, x))
        gf = eval_expr(g, eval_expr(f, x))
        defect = pbm_equal_defect(space, fg, gf)
        if pbm_equal(space, fg, gf, tol):
            satisfied += 1
        else:
            violated += 1
            witnesses.append(Witness((x,), fg, gf, defect,
                                     f"{pair_id} fail to commute"))
    return make_report(f"weak-compatibility{pair_id}", satisfied,
                       0 if points else 1, violated, None, witnesses)


# --- common fixed points --------------------------------------------------------


@dataclass
class FixedPointCertificate:
    point: float
    residuals: dict  # map label -> distance-equality defect of (map(d), d)
    certified: bool
    tol: float

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "residuals": dict(self.residuals),
            "certified": self.certified,
            "tol": self.tol,
        }


def certify_common_fixed_point(scenario: Scenario, d: float,
                               tol: float = DEFAULT_TOL) -> FixedPointCertificate:
    """Check that h, eta, Q, Z all fix d in the distance-equality sense;
    the certificate carries one residual per map."""
    residuals = {}
    certified = True
    for label in MAP_LABELS:
        value = eval_expr(scenario.map_by_name(label), d)
        residuals[label] = pbm_equal_defect(scenario.space, value, d)
        if not pbm_equal(scenario.space, value, d, tol):
            certified = False
    return FixedPointCertificate(float(d), residuals, certified, tol)


@dataclass
class UniquenessReport:
    points: list
    certificates: list
    multiple: bool
    searched: tuple
    warning: str | None = None

    def to_dict(self) -> dict:
        return {
            "points": list(self.points),
            "certificates": [c.to_dict() for c in self.certificates],
            "multiple": self.multiple,
            "searched": list(self.searched),
            "warning": self.warning,
        }


def search_uniqueness(scenario: Scenario, search_grid,
                      tol: float = DEFAULT_TOL) -> UniquenessReport:
    """Certified common fixed points over a grid, with sign-change
    refinement of each map's own fixed-point residual.  Uniqueness is
    relative to the searched region only; multiplicity is reported, not
    an error."""
    grid = sorted(float(x) for x in search_grid)
    if not grid:
        raise EmptyGrid("uniqueness search needs a nonempty grid")

    candidates = set(grid)
    for label in MAP_LABELS:
        ast = scenario.map_by_name(label)

        def residual(x, _ast=ast):
            return eval_expr(_ast, x) - x

        values = [residual(x) for x in grid]
        for (x0, r0), (x1, r1) in zip(zip(grid, values),
                                      zip(grid[1:], values[1:])):
            if r0 != 0.0 and r1 != 0.0 and (r0 < 0.0) != (r1 < 0.0):
                candidates.add(_bisect_residual(residual, x0, x1))

    points: list[float] = []
    certificates: list[FixedPointCertificate] = []
    for x in sorted(candidates):
        cert = certify_common_fixed_point(scenario, x, tol)
        if not cert.certified:
            continue
        if points and abs(x - points[-1]) <= slack(x, points[-1], tol):
            continue
        points.append(x)
        certificates.append(cert)
    warning = None
    if not points:
        warning = (
            "no certified common fixed point on the searched grid; "
            "the grid may not cover one"
        )
    return UniquenessReport(points, certificates, len(points) > 1,
                            (grid[0], grid[-1]), warning)
