"""Verdict containers produced by every checking operation.

All checks here are finite-sample falsification: a "pass" means no
violation was found on the sampled points, never a proof over the
(uncountable) carrier.  A witness records enough of the violated
inequality (points, both sides, gap) that re-evaluating it reproduces the
reported numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

WITNESS_CAP = 32


@dataclass(frozen=True)
class Witness:
    points: tuple
    lhs: float
    rhs: float
    gap: float
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "points": list(self.points),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "note": self.note,
        }


@dataclass
class AxiomReport:
    axiom_id: str
    verdict: str  # "pass" | "fail"
    witnesses: list = field(default_factory=list)
    samples_checked: int = 0

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "axiom_id": self.axiom_id,
            "verdict": self.verdict,
            "samples_checked": self.samples_checked,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }


@dataclass
class ComplianceReport:
    check_id: str
    verdict: str  # "pass" | "fail" | "vacuous"
    counts: dict  # keys: satisfied, vacuous, violated
    worst_margin: float | None
    witnesses: list = field(default_factory=list)
    notes: str = ""

    @property
    def passed(self) -> bool:
        # vacuous counts as non-failure; callers may still flag it
        return self.verdict != "fail"

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "verdict": self.verdict,
            "counts": dict(self.counts),
            "worst_margin": self.worst_margin,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "notes": self.notes,
        }


def make_report(
    check_id: str,
    satisfied: int,
    vacuous: int,
    violated: int,
    worst_margin: float | None,
    witnesses: list,
    notes: str = "",
    cap: int = WITNESS_CAP,
) -> ComplianceReport:
    """Assemble a report with the standard verdict rule: fail iff any
    violation; vacuous iff nothing non-vacuous was checked."""
    if violated > 0:
        verdict = "fail"
    elif satisfied == 0 and vacuous > 0:
        verdict = "vacuous"
    else:
        verdict = "pass"
    witnesses = sorted(witnesses, key=lambda w: w.points)[:cap]
    return ComplianceReport(
        check_id=check_id,
        verdict=verdict,
        counts={"satisfied": satisfied, "vacuous": vacuous, "violated": violated},
        worst_margin=worst_margin,
        witnesses=witnesses,
        notes=notes,
    )
