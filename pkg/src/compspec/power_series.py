"""Truncated power series with exact coefficient arithmetic.

``TruncatedSeries`` is immutable; all operations return new series and are
closed over the coefficient exactness class: exact in (Fraction /
GaussianRational) gives exact out, and mpf/mpc coefficients stay numeric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import CenterMismatch
from .numbers import GaussianRational, QuadraticNumber, format_rational, to_mpf


def _is_exact(c) -> bool:
    return isinstance(c, (int, Fraction, GaussianRational, QuadraticNumber))


def _inv(c):
    if isinstance(c, (int, Fraction)):
        return Fraction(1) / Fraction(c)
    return 1 / c


def _div_int(c, k: int):
    if isinstance(c, int):
        return Fraction(c, k)
    if isinstance(c, Fraction):
        return c / k
    return c / k


class TruncatedSeries:
    """Taylor polynomial sum_{n<=order} coeffs[n] * (x - center)**n."""

    __slots__ = ("center", "coeffs")

    def __init__(self, center, coeffs):
        self.center = center
        self.coeffs = tuple(coeffs)
        if not self.coeffs:
            raise ValueError("series needs at least the constant coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def is_exact(self) -> bool:
        return all(_is_exact(c) for c in self.coeffs)

    @classmethod
    def zero(cls, center, order):
        return cls(center, [Fraction(0)] * (order + 1))

    @classmethod
    def identity(cls, center, order):
        """The function x, expanded at center: center + (x - center)."""
        coeffs = [Fraction(0)] * (order + 1)
        coeffs[0] = center
        if order >= 1:
            coeffs[1] = Fraction(1)
        return cls(center, coeffs)

    def coefficient(self, n):
        return self.coeffs[n] if n <= self.order else Fraction(0)

    def truncate(self, order):
        if order >= self.order:
            return self
        return TruncatedSeries(self.center, self.coeffs[:order + 1])

    def _check_center(self, other):
        if isinstance(other, TruncatedSeries):
            if other.center != self.center:
                raise CenterMismatch(
                    f"centers differ: {self.center} vs {other.center}")
            return other
        return None

    def __add__(self, other):
        o = self._check_center(other)
        if o is None:
            coeffs = list(self.coeffs)
            coeffs[0] = coeffs[0] + other
            return TruncatedSeries(self.center, coeffs)
        n = min(self.order, o.order)
        return TruncatedSeries(self.center,
                               [self.coeffs[i] + o.coeffs[i] for i in range(n + 1)])

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.center, [-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._check_center(other)
        if o is None:
            return TruncatedSeries(self.center, [c * other for c in self.coeffs])
        n = min(self.order, o.order)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[:n + 1]):
            if _is_exact(a) and a == 0:
                continue
            for j in range(0, n - i + 1):
                out[i + j] = out[i + j] + a * o.coeffs[j]
        return TruncatedSeries(self.center, out)

    __rmul__ = __mul__

    def power(self, k: int):
        result = TruncatedSeries(self.center,
                                 [Fraction(1)] + [Fraction(0)] * self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            if k > 1:
                base = base * base
            k >>= 1
        return result

    def reciprocal(self):
        """1/f; requires a nonzero constant term."""
        c0 = self.coeffs[0]
        if _is_exact(c0) and c0 == 0:
            raise ZeroDivisionError("series has zero constant term")
        inv0 = _inv(c0)
        out = [inv0]
        for n in range(1, self.order + 1):
            acc = 0
            for k in range(0, n):
                acc = acc + out[k] * self.coefficient(n - k)
            out.append(-inv0 * acc)
        return TruncatedSeries(self.center, out)

    def divide(self, other):
        return self * other.reciprocal()

    def differentiate(self):
        if self.order == 0:
            return TruncatedSeries(self.center, [Fraction(0)])
        return TruncatedSeries(
            self.center, [(i + 1) * c for i, c in enumerate(self.coeffs[1:])])

    def integrate(self, constant=Fraction(0)):
        out = [constant]
        for i, c in enumerate(self.coeffs):
            out.append(_div_int(c, i + 1))
        return TruncatedSeries(self.center, out[:self.order + 2])

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(x)): inner's constant term must equal self's center."""
        if inner.coeffs[0] != self.center:
            raise CenterMismatch(
                f"inner constant term {inner.coeffs[0]} != outer center {self.center}")
        n = min(self.order, inner.order)
        shifted = TruncatedSeries(inner.center,
                                  (Fraction(0),) + inner.coeffs[1:n + 1])
        result = TruncatedSeries.zero(inner.center, n)
        for c in reversed(self.coeffs[:n + 1]):
            result = result * shifted + c
        return result

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse: series g at self(center) with g(self(x)) = x.

        Requires an invertible linear coefficient.
        """
        c1 = self.coeffs[1] if self.order >= 1 else Fraction(0)
        if _is_exact(c1) and c1 == 0:
            raise ZeroDivisionError("linear coefficient vanishes; not invertible")
        n = self.order
        # Work with t = x - center and s = y - self(center).
        f = (Fraction(0),) + self.coeffs[1:]
        # Powers of f up to needed order.
        powers = [None] * (n + 1)
        one = TruncatedSeries(0, [Fraction(1)] + [Fraction(0)] * n)
        fs = TruncatedSeries(0, f)
        powers[0] = one
        for k in range(1, n + 1):
            powers[k] = powers[k - 1] * fs
        g = [Fraction(0)] * (n + 1)
        if n >= 1:
            g[1] = _inv(c1)
        for m in range(2, n + 1):
            acc = Fraction(0)
            for k in range(1, m):
                acc = acc + g[k] * powers[k].coeffs[m]
            g[m] = -acc * _inv(powers[m].coeffs[m])  # denominator = c1**m
        new_center = self.coeffs[0]
        out = [self.center if m == 0 else g[m] for m in range(n + 1)]
        return TruncatedSeries(new_center, out)

    def eval(self, x):
        """Horner evaluation of the Taylor polynomial at x."""
        t = x - self.center
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * t + c
        return acc

    def map_coefficients(self, fn):
        return TruncatedSeries(self.center, [fn(c) for c in self.coeffs])

    def to_numeric(self, prec):
        from .numbers import to_mpc
        with mpmath.workprec(prec):
            center = self.center if not _is_exact(self.center) else to_mpf(self.center)
            if any(isinstance(c, GaussianRational) and c.im != 0 for c in self.coeffs):
                coeffs = [to_mpc(c) if _is_exact(c) else c for c in self.coeffs]
            else:
                coeffs = [to_mpf(c) if _is_exact(c) else c for c in self.coeffs]
        return TruncatedSeries(center, coeffs)

    def __eq__(self, other):
        return (isinstance(other, TruncatedSeries)
                and self.center == other.center and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.center, self.coeffs))

    def __repr__(self):
        return f"TruncatedSeries(center={self.center}, coeffs={list(self.coeffs)})"

    def to_json_dict(self):
        return {
            "center": _coeff_to_json(self.center),
            "order": self.order,
            "coeffs": [_coeff_to_json(c) for c in self.coeffs],
        }

    @classmethod
    def from_json_dict(cls, doc):
        return cls(_coeff_from_json(doc["center"]),
                   [_coeff_from_json(c) for c in doc["coeffs"]])


def _coeff_to_json(c):
    if isinstance(c, GaussianRational):
        if c.im == 0:
            return format_rational(c.re)
        return [format_rational(c.re), format_rational(c.im)]
    if isinstance(c, (int, Fraction)):
        return format_rational(Fraction(c))
    return ["float", mpmath.nstr(mpmath.mpf(c), 30)]


def _coeff_from_json(doc):
    if isinstance(doc, str):
        return Fraction(doc)
    if isinstance(doc, list) and len(doc) == 2 and doc[0] == "float":
        return mpmath.mpf(doc[1])
    if isinstance(doc, list) and len(doc) == 2:
        return GaussianRational(Fraction(doc[0]), Fraction(doc[1]))
    raise ValueError(f"bad coefficient document: {doc!r}")


# ---------------------------------------------------------------------------
# Radius verdicts


@dataclass(frozen=True)
class Converges:
    radius_estimate: object  # mpf, or None for entire (polynomial) solutions

    kind = "converges"


@dataclass(frozen=True)
class Diverges:
    certificate: dict

    kind = "diverges"


@dataclass(frozen=True)
class Inconclusive:
    reason: str

    kind = "inconclusive"


def _abs_mpf(c):
    if isinstance(c, GaussianRational):
        return mpmath.sqrt(to_mpf(c.abs2()))
    if isinstance(c, (int, Fraction)):
        return abs(to_mpf(c))
    return abs(mpmath.mpf(c)) if not isinstance(c, mpmath.mpc) else abs(c)


def _exact_abs2(c) -> Fraction:
    if isinstance(c, GaussianRational):
        return c.abs2()
    f = Fraction(c)
    return f * f


def estimate_radius(series: TruncatedSeries):
    """Heuristic radius-of-convergence verdict from the coefficient tail.

    Root test estimates r_n = |f_n|**(-1/n) over the tail half must
    stabilize (relative spread < 25%) for a Converges verdict.  A Diverges
    verdict is issued only from exact coefficients, by checking the
    factorial lower bound |f_n| >= (n-1)! * (1/2)**n across the whole tail
    (an exact integer comparison), which forces radius zero when it
    persists.  Everything else is Inconclusive.
    """
    if series.order < 16:
        raise ValueError("radius estimation needs order >= 16")
    n0 = series.order // 2
    tail = [(n, series.coeffs[n]) for n in range(n0, series.order + 1)]
    nonzero = [(n, c) for n, c in tail if not c == 0]

    if not nonzero:
        # The entire data tail vanishes: the solution is a polynomial.
        return Converges(None)

    # Exact factorial-growth certificate, checked before the root test.
    if series.is_exact() and len(nonzero) == len(tail):
        ok = True
        for n, c in nonzero:
            if n == 0:
                ok = False
                break
            bound = Fraction(math.factorial(n - 1), 2 ** n)
            if _exact_abs2(c) < bound * bound:
                ok = False
                break
        if ok:
            return Diverges({
                "test": "factorial-growth",
                "c": "1/2",
                "window": [n0, series.order],
                "statement": "|f_n| >= (n-1)! * (1/2)**n across the window",
            })

    if len(nonzero) < 4:
        return Inconclusive("too few nonzero tail coefficients")

    with mpmath.workprec(64):
        estimates = []
        for n, c in nonzero:
            a = _abs_mpf(c)
            if a == 0:
                continue
            estimates.append(a ** (mpmath.mpf(-1) / n))
        estimates.sort()
        median = estimates[len(estimates) // 2]
        spread = (estimates[-1] - estimates[0]) / median if median > 0 else mpmath.inf
        if median > 0 and spread < mpmath.mpf("0.25"):
            return Converges(median)
    return Inconclusive("root-test estimates did not stabilize")
