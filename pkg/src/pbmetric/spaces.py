"""Partial b-metric (and plain b-metric) spaces over interval carriers.

Axiom checking is falsification on a finite sample set, never a proof:
carriers are uncountable, so a passing report only says no violation was
found at the sampled points.  Distance equality is tolerance-based and
scale-aware throughout (see ``numerics``).

The partial b-metric axioms checked here, for coefficient ``s >= 1``:

  P1  x = y  iff  pd(x,x) = pd(x,y) = pd(y,y)      (indistinguishability)
  P2  pd(x,x) <= pd(x,y)                            (small self-distance)
  P3  pd(x,y) = pd(y,x)                             (symmetry)
  P4  pd(x,y) <= s*(pd(x,z) + pd(z,y)) - pd(z,z)    (modified triangle)

and the plain b-metric axioms:

  B1  b(x,y) = 0 iff x = y
  B2  b(x,y) = b(y,x)
  B3  b(x,y) <= s*(b(x,z) + b(z,y))
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DistanceEvaluationError,
    EmptySampleSet,
    EvaluationError,
    SequenceTooShort,
)
from .expressions import Expr, eval_expr, parse_expression, to_source
from .intervals import IntervalUnion, parse_interval_union
from .numerics import DEFAULT_TOL, close, slack
from .reports import WITNESS_CAP, AxiomReport, Witness

# named built-in distances accepted wherever a distance expression is
BUILTIN_DISTANCES = {
    "max_metric": "max(x, y)",
    "abs_diff": "abs(x - y)",
    "squared_diff": "(x - y)^2",
}


@dataclass(frozen=True)
class PartialBMetricSpace:
    """A carrier, a two-variable distance expression and a coefficient."""

    carrier: IntervalUnion
    distance: Expr
    s_coeff: float = 1.0
    declared_complete: bool = False

    def __post_init__(self):
        if self.s_coeff < 1.0:
            raise ValueError(f"s_coeff must be >= 1, got {self.s_coeff}")
        object.__setattr__(self, "carrier", self.carrier.normalized())

    @classmethod
    def from_text(
        cls,
        carrier: str = "[0, inf)",
        distance: str = "max(x, y)",
        s_coeff: float = 1.0,
        declared_complete: bool = True,
    ) -> "PartialBMetricSpace":
        distance = BUILTIN_DISTANCES.get(distance, distance)
        return cls(
            carrier=parse_interval_union(carrier),
            distance=parse_expression(distance, 2),
            s_coeff=s_coeff,
            declared_complete=declared_complete,
        )

    def pd(self, x: float, y: float) -> float:
        try:
            value = eval_expr(self.distance, x, y)
        except EvaluationError as exc:
            raise DistanceEvaluationError(
                f"distance {to_source(self.distance)!r} undefined at ({x}, {y}): {exc}"
            ) from exc
        if value < 0.0:
            raise DistanceEvaluationError(
                f"distance is negative ({value}) at ({x}, {y})"
            )
        return value

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.carrier.contains(x, tol)


def pbm_equal(space: PartialBMetricSpace, x: float, y: float,
              tol: float = DEFAULT_TOL) -> bool:
    """Point equality in the distance sense: all three of pd(x,x),
    pd(x,y), pd(y,y) agree within tolerance."""
    d_xy = space.pd(x, y)
    return close(space.pd(x, x), d_xy, tol) and close(space.pd(y, y), d_xy, tol)


def pbm_equal_defect(space: PartialBMetricSpace, x: float, y: float) -> float:
    """How far (x, y) are from distance-equality; 0 means indistinguishable.

    For a plain metric this is exactly pd(x, y)."""
    d_xy = space.pd(x, y)
    return max(abs(space.pd(x, x) - d_xy), abs(space.pd(y, y) - d_xy))


# --- axiom checking ----------------------------------------------------------


def _distance_matrix(space: PartialBMetricSpace, samples) -> np.ndarray:
    n = len(samples)
    D = np.empty((n, n), dtype=float)
    pd = space.pd
    for i, x in enumerate(samples):
        for j, y in enumerate(samples):
            D[i, j] = pd(x, y)
    return D


def _validate_samples(space, samples, tol):
    samples = [float(x) for x in samples]
    if not samples:
        raise EmptySampleSet("axiom checking needs at least one sample")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    for x in samples:
        if not space.contains(x, tol):
            raise ValueError(f"sample {x} is outside the carrier")
    return samples


def _pair_scale(D: np.ndarray, other: np.ndarray, tol: float) -> np.ndarray:
    return tol * np.maximum(1.0, np.maximum(np.abs(D), np.abs(other)))


def check_pbm_axioms(space: PartialBMetricSpace, samples, tol: float = DEFAULT_TOL,
                     cap: int = WITNESS_CAP) -> list:
    """Check the four partial b-metric axioms over a finite sample.

    Returns one AxiomReport per axiom, in order P1..P4.  Axiom P1 is
    checked in both directions; "same point" means equal as floats within
    tolerance, the only available notion of identity for sampled reals.
    """
    xs = _validate_samples(space, samples, tol)
    n = len(xs)
    pts = np.asarray(xs)
    D = _distance_matrix(space, xs)
    s = space.s_coeff
    self_d = np.diag(D).copy()

    same_pt = np.abs(pts[:, None] - pts[None, :]) <= tol * np.maximum(
        1.0, np.maximum(np.abs(pts[:, None]), np.abs(pts[None, :]))
    )

    reports = []

    # P1: x = y  iff the three distances agree
    eq_xx = np.abs(self_d[:, None] - D) <= _pair_scale(self_d[:, None], D, tol)
    eq_yy = np.abs(self_d[None, :] - D) <= _pair_scale(self_d[None, :], D, tol)
    three_eq = eq_xx & eq_yy
    viol_a = same_pt & ~three_eq  # identical points must be indistinguishable
    viol_b = ~same_pt & three_eq  # distinct points must be distinguishable
    witnesses = []
    for i, j in np.argwhere(viol_a | viol_b):
        if len(witnesses) >= cap:
            break
        note = "identical points with unequal distances" if viol_a[i, j] else \
            "distinct points indistinguishable"
        gap = max(abs(self_d[i] - D[i, j]), abs(self_d[j] - D[i, j]))
        witnesses.append(Witness((xs[i], xs[j]), self_d[i], D[i, j],
                                 gap if viol_a[i, j] else -gap, note))
    reports.append(AxiomReport("P1-indistinguishability",
                               "fail" if witnesses else "pass",
                               witnesses, n * n))

    # P2: pd(x,x) <= pd(x,y)
    lhs = np.repeat(self_d[:, None], n, axis=1)
    viol = lhs > D + _pair_scale(lhs, D, tol)
    witnesses = [
        Witness((xs[i], xs[j]), lhs[i, j], D[i, j], lhs[i, j] - D[i, j])
        for i, j in np.argwhere(viol)[:cap]
    ]
    reports.append(AxiomReport("P2-small-self-distance",
                               "fail" if witnesses else "pass",
                               witnesses, n * n))

    # P3: symmetry
    viol = np.abs(D - D.T) > _pair_scale(D, D.T, tol)
    witnesses = [
        Witness((xs[i], xs[j]), D[i, j], D[j, i], abs(D[i, j] - D[j, i]))
        for i, j in np.argwhere(viol)[:cap]
    ]
    reports.append(AxiomReport("P3-symmetry",
                               "fail" if witnesses else "pass",
                               witnesses, n * n))

    # P4: modified triangle over all ordered triples (x, z, y)
    witnesses = []
    for k in range(n):
        rhs = s * (D[:, k][:, None] + D[k, :][None, :]) - D[k, k]
        viol = D > rhs + _pair_scale(D, rhs, tol)
        if viol.any():
            for i, j in np.argwhere(viol):
                if len(witnesses) >= cap:
                    break
                witnesses.append(
                    Witness((xs[i], xs[k], xs[j]), D[i, j], rhs[i, j],
                            D[i, j] - rhs[i, j])
                )
        if len(witnesses) >= cap:
            break
    reports.append(AxiomReport("P4-modified-triangle",
                               "fail" if witnesses else "pass",
                               witnesses, n * n * n))
    return reports


def check_b_metric_axioms(space: PartialBMetricSpace, samples,
                          tol: float = DEFAULT_TOL,
                          cap: int = WITNESS_CAP) -> list:
    """Check the three plain b-metric axioms (zero self-distance variant)."""
    xs = _validate_samples(space, samples, tol)
    n = len(xs)
    pts = np.asarray(xs)
    D = _distance_matrix(space, xs)
    s = space.s_coeff
    same_pt = np.abs(pts[:, None] - pts[None, :]) <= tol * np.maximum(
        1.0, np.maximum(np.abs(pts[:, None]), np.abs(pts[None, :]))
    )

    reports = []

    # B1: b(x,y) = 0 iff x = y
    is_zero = np.abs(D) <= tol
    witnesses = []
    for i, j in np.argwhere((same_pt & ~is_zero) | (~same_pt & is_zero)):
        if len(witnesses) >= cap:
            break
        note = ("nonzero self-distance" if same_pt[i, j]
                else "distinct points at distance zero")
        witnesses.append(Witness((xs[i], xs[j]), D[i, j], 0.0, D[i, j], note))
    reports.append(AxiomReport("B1-identity",
                               "fail" if witnesses else "pass", witnesses, n * n))

    # B2: symmetry
    viol = np.abs(D - D.T) > _pair_scale(D, D.T, tol)
    witnesses = [
        Witness((xs[i], xs[j]), D[i, j], D[j, i], abs(D[i, j] - D[j, i]))
        for i, j in np.argwhere(viol)[:cap]
    ]
    reports.append(AxiomReport("B2-symmetry",
                               "fail" if witnesses else "pass", witnesses, n * n))

    # B3: relaxed triangle
    witnesses = []
    for k in range(n):
        rhs = s * (D[:, k][:, None] + D[k, :][None, :])
        viol = D > rhs + _pair_scale(D, rhs, tol)
        for i, j in np.argwhere(viol):
            if len(witnesses) >= cap:
                break
            witnesses.append(Witness((xs[i], xs[k], xs[j]), D[i, j], rhs[i, j],
                                     D[i, j] - rhs[i, j]))
        if len(witnesses) >= cap:
            break
    reports.append(AxiomReport("B3-relaxed-triangle",
                               "fail" if witnesses else "pass", witnesses,
                               n * n * n))
    return reports


# --- sequence diagnostics ------------------------------------------------------


@dataclass
class ConvergenceVerdict:
    converged: bool
    tail_discrepancy: float
    self_distance: float
    window: int

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "tail_discrepancy": self.tail_discrepancy,
            "self_distance": self.self_distance,
            "window": self.window,
        }


@dataclass
class CauchyVerdict:
    is_cauchy: bool
    limit_estimate: float
    spread: float
    window: int

    def to_dict(self) -> dict:
        return {
            "is_cauchy": self.is_cauchy,
            "limit_estimate": self.limit_estimate,
            "spread": self.spread,
            "window": self.window,
        }


def check_convergence(space: PartialBMetricSpace, sequence, limit: float,
                      tol: float = DEFAULT_TOL, window: int = 8) -> ConvergenceVerdict:
    """Convergence in the partial b-metric sense: pd(z_k, limit) must
    approach pd(limit, limit) — not necessarily zero — over the final
    ``window`` entries."""
    seq = [float(x) for x in sequence]
    if len(seq) < window:
        raise SequenceTooShort(
            f"need at least window={window} points, got {len(seq)}"
        )
    d_ll = space.pd(limit, limit)
    tail = seq[-window:]
    disc = max(abs(space.pd(z, limit) - d_ll) for z in tail)
    converged = all(
        abs(space.pd(z, limit) - d_ll) <= slack(space.pd(z, limit), d_ll, tol)
        for z in tail
    )
    return ConvergenceVerdict(converged, disc, d_ll, window)


def check_cauchy_numeric(space: PartialBMetricSpace, sequence,
                         tol: float = DEFAULT_TOL, window: int = 8) -> CauchyVerdict:
    """Numeric Cauchy test: all pairwise distances inside the final window
    must agree within tolerance; their mean estimates the double limit."""
    seq = [float(x) for x in sequence]
    if len(seq) < 2 * window:
        raise SequenceTooShort(
            f"need at least 2*window={2 * window} points, got {len(seq)}"
        )
    tail = seq[-window:]
    values = [space.pd(a, b) for a in tail for b in tail]
    spread = max(values) - min(values)
    a, b = max(values), min(values)
    return CauchyVerdict(spread <= slack(a, b, tol), sum(values) / len(values),
                         spread, window)


# --- sampling -------------------------------------------------------------------


def sample_carrier(
    carrier: IntervalUnion,
    lo: float,
    hi: float,
    n_grid: int = 201,
    n_random: int = 16,
    seed: int = 0,
    extra=(),
) -> list:
    """Deterministic sample of a carrier restricted to [lo, hi]:
    a uniform grid, the finite interval endpoints, seeded pseudorandom
    points and any caller-supplied extras (piecewise breakpoints)."""
    if hi < lo:
        raise ValueError("hi must be >= lo")
    points = set()
    if n_grid > 0:
        for x in np.linspace(lo, hi, n_grid):
            if carrier.contains(float(x)):
                points.add(float(x))
    for e in carrier.finite_endpoints():
        if lo <= e <= hi:
            points.add(float(e))
    for e in extra:
        if lo <= e <= hi and carrier.contains(float(e)):
            points.add(float(e))
    if n_random > 0:
        rng = np.random.default_rng(seed)
        drawn = attempts = 0
        while drawn < n_random and attempts < 64 * n_random:
            attempts += 1
            x = float(rng.uniform(lo, hi))
            if carrier.contains(x):
                points.add(x)
                drawn += 1
    return sorted(points)
