"""Intervals and interval unions over the real line.

These back both the carrier descriptions of spaces (normalized, pairwise
disjoint) and the membership conditions of piecewise expressions (kept
exactly as written, first match wins).  Endpoints carry explicit
open/closed flags so membership at a breakpoint is never ambiguous.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

INF = math.inf

_BOUND_RE = re.compile(
    r"\s*(-?)\s*(inf|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*"
)


def _format_bound(value: float) -> str:
    if value == INF:
        return "inf"
    if value == -INF:
        return "-inf"
    return repr(value)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval bounds may not be NaN")
        if self.lo > self.hi:
            raise ValueError(f"interval has lo > hi: {self}")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise ValueError(f"interval is empty: {self}")
        if self.lo == -INF and self.lo_closed:
            raise ValueError("-inf endpoint must be open")
        if self.hi == INF and self.hi_closed:
            raise ValueError("inf endpoint must be open")

    def contains(self, x: float, tol: float = 0.0) -> bool:
        """Membership; a positive tol widens the interval on both sides."""
        if tol > 0.0:
            return self.lo - tol <= x <= self.hi + tol
        lo_ok = x > self.lo or (self.lo_closed and x == self.lo)
        hi_ok = x < self.hi or (self.hi_closed and x == self.hi)
        return lo_ok and hi_ok

    def clip(self, lo: float, hi: float) -> "Interval | None":
        """Intersection with the closed box [lo, hi], or None if empty."""
        new_lo, new_lc = (lo, True) if lo > self.lo else (self.lo, self.lo_closed)
        new_hi, new_hc = (hi, True) if hi < self.hi else (self.hi, self.hi_closed)
        if new_lo > new_hi or (new_lo == new_hi and not (new_lc and new_hc)):
            return None
        return Interval(new_lo, new_hi, new_lc, new_hc)

    def to_source(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{_format_bound(self.lo)}, {_format_bound(self.hi)}{right}"


@dataclass(frozen=True)
class IntervalUnion:
    """An ordered union of intervals; ``a or b or ...`` in source form."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        if not self.intervals:
            raise ValueError("interval union must contain at least one interval")

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return any(iv.contains(x, tol) for iv in self.intervals)

    def is_bounded(self) -> bool:
        return all(iv.hi < INF and iv.lo > -INF for iv in self.intervals)

    def finite_endpoints(self) -> list[float]:
        out = []
        for iv in self.intervals:
            if iv.lo > -INF:
                out.append(iv.lo)
            if iv.hi < INF:
                out.append(iv.hi)
        return sorted(set(out))

    def to_source(self) -> str:
        return " or ".join(iv.to_source() for iv in self.intervals)

    def normalized(self) -> "IntervalUnion":
        """Sorted, overlap-free form. Touching intervals merge when at
        least one side of the shared endpoint is closed."""
        ivs = sorted(self.intervals, key=lambda i: (i.lo, not i.lo_closed))
        merged: list[Interval] = []
        for iv in ivs:
            if merged:
                last = merged[-1]
                overlaps = iv.lo < last.hi or (
                    iv.lo == last.hi and (iv.lo_closed or last.hi_closed)
                )
                if overlaps:
                    if (iv.hi, iv.hi_closed) > (last.hi, last.hi_closed):
                        merged[-1] = Interval(
                            last.lo, iv.hi, last.lo_closed, iv.hi_closed
                        )
                    continue
            merged.append(iv)
        return IntervalUnion(tuple(merged))

    def intersection(self, other: "IntervalUnion") -> "IntervalUnion | None":
        """Normalized intersection, or None when empty."""
        out: list[Interval] = []
        for a in self.normalized().intervals:
            for b in other.normalized().intervals:
                # tighter bound wins; openness rides along with it
                if (a.lo, not a.lo_closed) >= (b.lo, not b.lo_closed):
                    lo, lc = a.lo, a.lo_closed
                else:
                    lo, lc = b.lo, b.lo_closed
                if (a.hi, a.hi_closed) <= (b.hi, b.hi_closed):
                    hi, hc = a.hi, a.hi_closed
                else:
                    hi, hc = b.hi, b.hi_closed
                if lo < hi or (lo == hi and lc and hc):
                    out.append(Interval(lo, hi, lc, hc))
        if not out:
            return None
        return IntervalUnion(tuple(out)).normalized()

    @staticmethod
    def union_of(a: "IntervalUnion", b: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(a.intervals + b.intervals).normalized()


def parse_bound(text: str) -> float:
    m = _BOUND_RE.fullmatch(text)
    if not m:
        raise ValueError(f"bad interval bound: {text!r}")
    sign = -1.0 if m.group(1) == "-" else 1.0
    body = m.group(2)
    return sign * (INF if body == "inf" else float(body))


def parse_interval(text: str) -> Interval:
    text = text.strip()
    if len(text) < 2 or text[0] not in "[(" or text[-1] not in ")]":
        raise ValueError(f"bad interval syntax: {text!r}")
    lo_closed = text[0] == "["
    hi_closed = text[-1] == "]"
    parts = text[1:-1].split(",")
    if len(parts) != 2:
        raise ValueError(f"interval needs exactly two bounds: {text!r}")
    return Interval(parse_bound(parts[0]), parse_bound(parts[1]), lo_closed, hi_closed)


def parse_interval_union(text: str) -> IntervalUnion:
    """Parse ``"[0, 1] or (2, inf)"`` style carrier descriptions."""
    parts = re.split(r"\bor\b", text)
    return IntervalUnion(tuple(parse_interval(p) for p in parts))
