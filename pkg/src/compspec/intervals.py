"""Open intervals with exact rational or infinite endpoints.

Endpoints are ``Fraction`` or the module-level ``NEG_INF`` / ``POS_INF``
sentinels; membership tests for rational points are exact.  Also provides
the small amount of interval-set algebra the covering machinery needs
(intersection, union coverage, reflection).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ExpressionSyntaxError
from .numbers import QuadraticNumber, parse_rational


class _Infinity:
    __slots__ = ("sign",)

    def __init__(self, sign):
        self.sign = sign

    def __lt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __gt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign > other.sign
        return self.sign > 0

    def __le__(self, other):
        return self < other or self == other

    def __ge__(self, other):
        return self > other or self == other

    def __eq__(self, other):
        return isinstance(other, _Infinity) and other.sign == self.sign

    def __neg__(self):
        return NEG_INF if self.sign > 0 else POS_INF

    def __hash__(self):
        return hash(("inf", self.sign))

    def __repr__(self):
        return "+inf" if self.sign > 0 else "-inf"


POS_INF = _Infinity(1)
NEG_INF = _Infinity(-1)


def is_finite(x) -> bool:
    return not isinstance(x, _Infinity)


def ext_lt(a, b) -> bool:
    """a < b on the extended line; finite values may be Fraction or
    QuadraticNumber (both support exact comparison)."""
    if isinstance(a, _Infinity):
        return a.sign < 0 and not (isinstance(b, _Infinity) and b.sign < 0)
    if isinstance(b, _Infinity):
        return b.sign > 0
    return a < b


def ext_min(a, b):
    return a if ext_lt(a, b) else b


def ext_max(a, b):
    return b if ext_lt(a, b) else a


class Interval:
    """Open interval (lower, upper) on the extended real line."""

    __slots__ = ("lower", "upper")

    def __init__(self, lower, upper):
        lower = Fraction(lower) if isinstance(lower, (int, str)) else lower
        upper = Fraction(upper) if isinstance(upper, (int, str)) else upper
        if not ext_lt(lower, upper):
            raise ValueError(f"empty interval: ({lower}, {upper})")
        self.lower = lower
        self.upper = upper

    @classmethod
    def real_line(cls) -> "Interval":
        return cls(NEG_INF, POS_INF)

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """Parse "(lo,hi)" with "inf"/"-inf" allowed."""
        s = text.strip()
        if not (s.startswith("(") and s.endswith(")")):
            raise ExpressionSyntaxError("interval must look like (lo,hi)", 0)
        parts = s[1:-1].split(",")
        if len(parts) != 2:
            raise ExpressionSyntaxError("interval needs exactly one comma", 1)

        def endpoint(token, k):
            token = token.strip()
            if token in ("inf", "+inf", "oo", "+oo"):
                return POS_INF
            if token in ("-inf", "-oo"):
                return NEG_INF
            try:
                return parse_rational(token)
            except (ValueError, ZeroDivisionError):
                raise ExpressionSyntaxError(f"bad endpoint {token!r}", k) from None

        return cls(endpoint(parts[0], 1), endpoint(parts[1], 2))

    def contains(self, x) -> bool:
        """Exact membership for Fraction/int/QuadraticNumber points; floats
        and mpf values are compared as-is (callers own rounding concerns)."""
        lo_ok = (not is_finite(self.lower)) or _lt_num(self.lower, x)
        hi_ok = (not is_finite(self.upper)) or _lt_num(x, self.upper)
        return lo_ok and hi_ok

    def contains_interval(self, other: "Interval") -> bool:
        lo_ok = (not is_finite(self.lower)) or (
            is_finite(other.lower) and not ext_lt(other.lower, self.lower))
        hi_ok = (not is_finite(self.upper)) or (
            is_finite(other.upper) and not ext_lt(self.upper, other.upper))
        return lo_ok and hi_ok

    def intersect(self, other: "Interval"):
        lo = ext_max(self.lower, other.lower)
        hi = ext_min(self.upper, other.upper)
        if ext_lt(lo, hi):
            return Interval(lo, hi)
        return None

    def reflect(self, axis: Fraction) -> "Interval":
        """Image under x -> 2*axis - x."""
        two_axis = 2 * axis
        new_lo = NEG_INF if self.upper == POS_INF else two_axis - self.upper
        new_hi = POS_INF if self.lower == NEG_INF else two_axis - self.lower
        return Interval(new_lo, new_hi)

    def midpoint(self) -> Fraction:
        """A representative interior rational point."""
        lo, hi = self.lower, self.upper
        if is_finite(lo) and is_finite(hi):
            return (lo + hi) / 2
        if is_finite(lo):
            return lo + 1
        if is_finite(hi):
            return hi - 1
        return Fraction(0)

    def is_bounded(self) -> bool:
        return is_finite(self.lower) and is_finite(self.upper)

    def __eq__(self, other):
        return (isinstance(other, Interval)
                and self.lower == other.lower and self.upper == other.upper)

    def __hash__(self):
        return hash((self.lower, self.upper))

    def __repr__(self):
        return f"Interval({self.lower}, {self.upper})"

    def __str__(self):
        lo = "-inf" if self.lower == NEG_INF else str(self.lower)
        hi = "inf" if self.upper == POS_INF else str(self.upper)
        return f"({lo},{hi})"


def _lt_num(a, b) -> bool:
    if isinstance(a, QuadraticNumber) or isinstance(b, QuadraticNumber):
        return (a < b) if isinstance(a, QuadraticNumber) else (b > a)
    return a < b


def union_covers(pieces: list[Interval], target: Interval) -> bool:
    """Whether a finite union of open intervals covers the open target.

    Open endpoints matter: (a,b) and (b,c) together do not cover b.
    """
    parts = [p.intersect(target) for p in pieces]
    parts = [p for p in parts if p is not None]
    if not parts:
        return False
    parts.sort(key=_lower_key)
    covered_to = None  # exclusive frontier: we have covered (target.lower, covered_to)
    for part in parts:
        start = part.lower
        if covered_to is None:
            if ext_lt(target.lower, start):
                return False
            covered_to = part.upper
        else:
            # the next piece must strictly overlap the frontier (open sets)
            if not ext_lt(start, covered_to):
                return False
            covered_to = ext_max(covered_to, part.upper)
        if not ext_lt(covered_to, target.upper):
            return True
    return not ext_lt(covered_to, target.upper)


def _lower_key(p: Interval):
    if not is_finite(p.lower):
        return (0, Fraction(0))
    return (1, p.lower)


def intersect_unions(a: list[Interval], b: list[Interval]) -> list[Interval]:
    """Pairwise intersection of two finite unions, as a sorted union."""
    out = []
    for p in a:
        for q in b:
            r = p.intersect(q)
            if r is not None:
                out.append(r)
    out.sort(key=_lower_key)
    return out
