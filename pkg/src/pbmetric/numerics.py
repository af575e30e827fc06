"""Tolerance conventions used by every comparison in the package.

Equality of reals is scale-aware: two values are "equal" when their
difference is below ``tol * max(1, |a|, |b|)``.  Inequalities get the same
slack on their violated side, so a check never reports a witness whose gap
is attributable to float rounding at the working scale.
"""

from __future__ import annotations

DEFAULT_TOL = 1e-9


def slack(a: float, b: float, tol: float = DEFAULT_TOL) -> float:
    """Allowed discrepancy between two values at their combined scale."""
    return tol * max(1.0, abs(a), abs(b))


def close(a: float, b: float, tol: float = DEFAULT_TOL) -> bool:
    return abs(a - b) <= slack(a, b, tol)


def leq(lhs: float, rhs: float, tol: float = DEFAULT_TOL) -> bool:
    """lhs <= rhs up to scale-aware slack."""
    return lhs <= rhs + slack(lhs, rhs, tol)
