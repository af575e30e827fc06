"""Auxiliary function classes used by the contraction toolkit.

Three classes, each with a sample-based verifier:

* altering-distance functions: continuous, non-decreasing, vanishing
  exactly at 0 (``check_xi``);
* the vanishing-control class: continuous, nonnegative, and
  ``omega(s_n) -> 0`` forces ``s_n -> 0`` (``check_omega1``) — checked on
  probe sequences via the contrapositive, since the defining implication
  quantifies over all sequences;
* C-class functions: continuous ``H(t, z) <= t`` with equality only when
  ``t = 0`` or ``z = 0`` (``check_cclass``).

Membership in these classes is semi-decidable at best; a passing report
flags consistency with the class on the sampled inputs, nothing more.
Continuity is probed by a shrinking-increment heuristic: the increment
halves six times and the final difference must have decayed to at most
half the initial one, which catches jump discontinuities at the sampled
points (at a jump the difference plateaus instead of decaying).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SequenceTooShort, UnsortedSamples
from .expressions import Expr, eval_expr, parse_expression
from .numerics import DEFAULT_TOL, close, leq
from .reports import ComplianceReport, Witness, make_report

_HALVINGS = 6
_DECAY_FACTOR = 0.5


@dataclass(frozen=True)
class XiFunction:
    """Candidate altering-distance function (one variable)."""

    expr: Expr
    name: str = "custom"

    def __call__(self, t: float) -> float:
        return eval_expr(self.expr, t)


@dataclass(frozen=True)
class OmegaOneFunction:
    """Candidate vanishing-control function (one variable).

    ``declared_class`` records which class the user claims; only the
    ``omega-1`` variant has a checker, since that is the one the
    contraction machinery uses.
    """

    expr: Expr
    name: str = "custom"
    declared_class: str = "omega-1"

    def __call__(self, t: float) -> float:
        return eval_expr(self.expr, t)


@dataclass(frozen=True)
class CClassFunction:
    """Candidate C-class function (two variables, named x and y)."""

    expr: Expr
    preset: str = "custom"

    def __call__(self, t: float, z: float) -> float:
        return eval_expr(self.expr, t, z)


# --- presets ----------------------------------------------------------------


def xi_identity() -> XiFunction:
    return XiFunction(parse_expression("z", 1), name="identity")


def omega_log3() -> OmegaOneFunction:
    return OmegaOneFunction(parse_expression("log(z + 3)", 1), name="log3")


def cclass_half() -> CClassFunction:
    """H(t, z) = t/2; equals t only at t = 0."""
    return CClassFunction(parse_expression("x / 2", 2), preset="half-t")


def cclass_truncated_difference() -> CClassFunction:
    """H(t, z) = t - z when t >= z, else 0; equality forces z = 0 or t = 0."""
    return CClassFunction(parse_expression("max(x - y, 0)", 2),
                          preset="truncated-difference")


XI_PRESETS = {"identity": xi_identity}
OMEGA_PRESETS = {"log3": omega_log3}
CCLASS_PRESETS = {
    "half-t": cclass_half,
    "truncated-difference": cclass_truncated_difference,
}


# --- continuity heuristic ------------------------------------------------------


def _continuity_defect(f, t: float, tol: float) -> float | None:
    """Positive defect when |f(t+h) - f(t)| fails to decay as h halves.

    Returns None when the function looks continuous at t (or the initial
    difference is already below tolerance).  Both sides are probed where
    the domain (nonnegative reals) allows.
    """
    base = f(t)
    worst = None
    h0 = max(1e-3, 1e-3 * abs(t))
    for direction in (+1.0, -1.0):
        if direction < 0 and t - h0 < 0.0:
            continue
        d_first = abs(f(t + direction * h0) - base)
        if d_first <= tol:
            continue
        h = h0
        for _ in range(_HALVINGS):
            h *= 0.5
        d_last = abs(f(t + direction * h) - base)
        allowed = _DECAY_FACTOR * d_first + tol
        if d_last > allowed:
            defect = d_last - allowed
            if worst is None or defect > worst:
                worst = defect
    return worst


# --- checkers -------------------------------------------------------------------


def check_xi(xi: XiFunction, samples, tol: float = DEFAULT_TOL) -> ComplianceReport:
    """Verify altering-distance behaviour on a sorted sample: vanishes at 0
    and only there, non-decreasing, continuity heuristic."""
    ts = [float(t) for t in samples]
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise UnsortedSamples("samples must be sorted ascending")
    if not ts or ts[0] > tol:
        raise UnsortedSamples("samples must include 0")
    if ts[0] < -tol:
        raise ValueError("samples must be nonnegative")

    satisfied = violated = 0
    witnesses = []
    worst = None

    def record(points, lhs, rhs, note):
        nonlocal violated
        violated += 1
        witnesses.append(Witness(points, lhs, rhs, lhs - rhs, note))

    values = [xi(t) for t in ts]
    for t, v in zip(ts, values):
        if t <= tol:
            if abs(v) <= tol:
                satisfied += 1
            else:
                record((t,), v, 0.0, "xi(0) must be 0")
        else:
            if v > tol:
                satisfied += 1
            else:
                record((t,), v, tol, "xi must be positive away from 0")
    for (t1, v1), (t2, v2) in zip(zip(ts, values), zip(ts[1:], values[1:])):
        margin = v2 - v1
        if leq(v1, v2, tol):
            satisfied += 1
            if worst is None or margin < worst:
                worst = margin
        else:
            record((t1, t2), v1, v2, "xi must be non-decreasing")
    for t in ts:
        defect = _continuity_defect(xi, t, tol)
        if defect is None:
            satisfied += 1
        else:
            record((t,), defect, 0.0, "continuity heuristic failed")

    return make_report("xi-class", satisfied, 0, violated, worst, witnesses)


def check_cclass(H: CClassFunction, sample_pairs,
                 tol: float = DEFAULT_TOL) -> ComplianceReport:
    """Verify H <= t with equality only at t = 0 or z = 0, plus
    nonnegativity, over the sampled pairs."""
    satisfied = violated = 0
    witnesses = []
    worst = None
    for t, z in sample_pairs:
        t, z = float(t), float(z)
        if t < 0 or z < 0:
            raise ValueError("C-class sample pairs must be nonnegative")
        v = H(t, z)
        ok = True
        if v < -tol:
            witnesses.append(Witness((t, z), v, 0.0, -v, "H must be nonnegative"))
            ok = False
        if not leq(v, t, tol):
            witnesses.append(Witness((t, z), v, t, v - t, "H(t, z) must be <= t"))
            ok = False
        elif close(v, t, tol) and min(t, z) > tol:
            witnesses.append(
                Witness((t, z), v, t, 0.0,
                        "H(t, z) = t with both arguments positive")
            )
            ok = False
        margin = t - v
        if worst is None or margin < worst:
            worst = margin
        if ok:
            satisfied += 1
        else:
            violated += 1
    if satisfied + violated == 0:
        raise ValueError("sample_pairs must be nonempty")
    return make_report("cclass", satisfied, 0, violated, worst, witnesses)


def default_probe_sequences(tol: float = DEFAULT_TOL, length: int = 32) -> list:
    """Probes covering bounded-away and vanishing regimes."""
    n = range(1, length + 1)
    probes = [[c] * length for c in (tol * 10, 0.5, 1.0, 10.0)]
    probes.append([1.0 + 1.0 / k for k in n])
    probes.append([1.0 / k for k in n])
    probes.append([2.0 ** -k for k in n])
    return probes


def check_omega1(omega: OmegaOneFunction, probe_sequences=None,
                 tol: float = DEFAULT_TOL) -> ComplianceReport:
    """Contrapositive test of the vanishing-control property: on any probe
    whose tail stays bounded away from 0, omega's tail must stay bounded
    away from 0 too.  Vanishing probes impose no constraint."""
    if probe_sequences is None:
        probe_sequences = default_probe_sequences(tol)
    satisfied = vacuous = violated = 0
    witnesses = []
    worst = None
    for idx, probe in enumerate(probe_sequences):
        seq = [float(v) for v in probe]
        if len(seq) < 16:
            raise SequenceTooShort(
                f"probe #{idx} has {len(seq)} < 16 entries"
            )
        tail = seq[len(seq) // 2:]
        omega_tail = [omega(v) for v in tail]
        if min(omega_tail) < -tol:
            violated += 1
            witnesses.append(Witness((min(omega_tail),), min(omega_tail), 0.0,
                                     -min(omega_tail),
                                     f"probe #{idx}: omega must be nonnegative"))
            continue
        eps = min(tail)
        if eps <= tol:
            vacuous += 1  # probe vanishes; class imposes nothing
            continue
        delta = min(omega_tail)
        if worst is None or delta < worst:
            worst = delta
        if delta > tol:
            satisfied += 1
        else:
            violated += 1
            witnesses.append(
                Witness((eps,), delta, tol, tol - delta,
                        f"probe #{idx}: omega tail vanishes on a sequence "
                        "bounded away from 0")
            )
    # continuity heuristic at a few representative points
    for t in (0.0, 0.5, 1.0, 10.0):
        defect = _continuity_defect(omega, t, tol)
        if defect is None:
            satisfied += 1
        else:
            violated += 1
            witnesses.append(Witness((t,), defect, 0.0, defect,
                                     "continuity heuristic failed"))
    return make_report("omega-1-class", satisfied, vacuous, violated, worst,
                       witnesses)
