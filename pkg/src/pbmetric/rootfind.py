"""Preimage solving: given a one-variable map f and a target value, find a
carrier point x with f(x) = target.

Resolution order: a user-supplied inverse expression (validated by forward
evaluation), then bracketed bisection after a coarse scan of the carrier.
Bisection returns the leftmost bracketed root — a deterministic but
arbitrary choice when f is not injective.  Carrier intervals unbounded
above are scanned on an adaptive window that grows from a target-sized
guess; maps growing slower than their targets can defeat the window, a
documented limitation.
"""

from __future__ import annotations

import math

from .errors import EvaluationError, InverseInconsistent, NoBracketFound
from .expressions import Expr, eval_expr
from .intervals import INF, IntervalUnion
from .numerics import DEFAULT_TOL, close

_SCAN_POINTS = 1024
_WINDOW_GROWTHS = 8


def _scan_ranges(carrier: IntervalUnion, target: float):
    """Finite [lo, hi] ranges to scan, one per carrier interval."""
    for iv in carrier.normalized().intervals:
        lo = iv.lo if iv.lo > -INF else min(-1.0, -2.0 * abs(target) - 1.0)
        if iv.hi < INF:
            yield lo, iv.hi, False
        else:
            hi = max(2.0 * abs(target) + 1.0, lo + 64.0)
            yield lo, hi, True


def _bisect(f, lo: float, hi: float, target: float, tol: float) -> float:
    f_lo = f(lo) - target
    if f_lo == 0.0:
        return lo
    rising = f_lo < 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        r = f(mid) - target
        if r == 0.0:
            return mid
        if (r < 0.0) == rising:
            lo = mid
        else:
            hi = mid
    return lo if abs(f(lo) - target) <= abs(f(hi) - target) else hi


def solve_preimage(
    f: Expr,
    target: float,
    carrier: IntervalUnion,
    inverse: Expr | None = None,
    tol: float = DEFAULT_TOL,
) -> float:
    """Return x in the carrier with f(x) = target (scale-aware tolerance).

    Raises InverseInconsistent when a supplied inverse fails forward
    validation, NoBracketFound when scanning produces no usable bracket.
    """

    def fv(x: float) -> float:
        return eval_expr(f, x)

    if inverse is not None:
        x = eval_expr(inverse, target)
        if not close(fv(x), target, tol):
            raise InverseInconsistent(
                f"inverse gave x={x} but f(x)={fv(x)} != target={target}"
            )
        if not carrier.contains(x, tol * max(1.0, abs(x))):
            raise InverseInconsistent(
                f"inverse gave x={x} outside the carrier"
            )
        return x

    for lo0, hi0, growable in _scan_ranges(carrier, target):
        hi = hi0
        for _ in range(_WINDOW_GROWTHS if growable else 1):
            x = _scan_for_root(fv, lo0, hi, target, tol)
            if x is not None:
                return x
            if not growable:
                break
            hi = lo0 + 2.0 * (hi - lo0)
    raise NoBracketFound(
        f"no carrier bracket of f around target {target} produced a root"
    )


def _scan_for_root(fv, lo: float, hi: float, target: float, tol: float):
    """Scan [lo, hi] at uniform resolution; bisect every sign-change
    bracket left to right and return the first root that validates."""
    step = (hi - lo) / _SCAN_POINTS
    if step <= 0.0:
        points = [lo]
    else:
        points = [lo + k * step for k in range(_SCAN_POINTS + 1)]
        points[-1] = hi
    prev_x = None
    prev_r = None
    for x in points:
        try:
            r = fv(x) - target
        except EvaluationError:
            prev_x, prev_r = None, None
            continue
        if math.isnan(r):
            prev_x, prev_r = None, None
            continue
        if r == 0.0 or close(fv(x), target, tol):
            return x
        if prev_r is not None and (prev_r < 0.0) != (r < 0.0):
            root = _bisect(fv, prev_x, x, target, tol)
            if close(fv(root), target, tol):
                return root
            # a sign change across a jump has no root; keep scanning
        prev_x, prev_r = x, r
    return None
