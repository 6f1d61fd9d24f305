"""Dense univariate polynomial arithmetic over exact rationals.

Coefficient lists are ascending (index = degree) with a nonzero leading
entry unless the polynomial is zero (empty list is not used; the zero
polynomial is ``[Fraction(0)]``).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DegreeOverflow

DEGREE_CAP = 4096

ZERO = (Fraction(0),)


def normalize(coeffs) -> list[Fraction]:
    out = [Fraction(c) for c in coeffs]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out or [Fraction(0)]


def degree(p) -> int:
    """Degree with the convention degree(0) = 0."""
    return len(p) - 1


def is_zero(p) -> bool:
    return all(c == 0 for c in p)


def add(p, q):
    n = max(len(p), len(q))
    return normalize([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                      for i in range(n)])


def neg(p):
    return [-c for c in p]


def sub(p, q):
    return add(p, neg(q))


def scale(p, k):
    k = Fraction(k)
    return normalize([c * k for c in p])


def mul(p, q):
    if is_zero(p) or is_zero(q):
        return [Fraction(0)]
    if degree(p) + degree(q) > DEGREE_CAP:
        raise DegreeOverflow(f"product degree exceeds {DEGREE_CAP}")
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return normalize(out)


def power(p, n: int):
    result = [Fraction(1)]
    base = list(p)
    while n:
        if n & 1:
            result = mul(result, base)
        base_needed = n >> 1
        if base_needed:
            base = mul(base, base)
        n >>= 1
    return result


def compose(p, q):
    """p(q(x)) by Horner over polynomial coefficients."""
    if degree(p) * max(degree(q), 1) > DEGREE_CAP:
        raise DegreeOverflow(f"composition degree exceeds {DEGREE_CAP}")
    result = [Fraction(0)]
    for c in reversed(p):
        result = add(mul(result, q), [Fraction(c)])
    return result


def derivative(p):
    if len(p) == 1:
        return [Fraction(0)]
    return normalize([Fraction(i) * c for i, c in enumerate(p)][1:])


def eval_at(p, x):
    """Horner evaluation; works for Fraction, QuadraticNumber, Gaussian, mpf."""
    result = None
    for c in reversed(p):
        result = c if result is None else result * x + c
    return result


def shift(p, a):
    """Coefficients of p(x + a)."""
    return compose(p, [Fraction(a), Fraction(1)])


def monic_x():
    return [Fraction(0), Fraction(1)]


def from_pairs(*pairs):
    """Build from (degree, coefficient) pairs."""
    n = max(d for d, _ in pairs)
    out = [Fraction(0)] * (n + 1)
    for d, c in pairs:
        out[d] += Fraction(c)
    return normalize(out)


def content_free(p):
    """Clear denominators and integer content; preserves roots and signs up
    to a positive factor, which keeps Sturm-sequence sign data intact."""
    from math import gcd, lcm
    den = lcm(*(c.denominator for c in p)) if len(p) > 1 else p[0].denominator
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, abs(c))
    if g > 1:
        ints = [c // g for c in ints]
    return [Fraction(c) for c in ints]


def pseudo_rem(p, q):
    """Remainder of p by q over the rationals (exact)."""
    p = list(p)
    dq = degree(q)
    if dq == 0:
        return [Fraction(0)]
    lead = q[-1]
    while degree(p) >= dq and not is_zero(p):
        factor = p[-1] / lead
        k = degree(p) - dq
        for i, c in enumerate(q):
            p[i + k] -= factor * c
        p = normalize(p[:-1]) if len(p) > 1 else [Fraction(0)]
    return normalize(p)
