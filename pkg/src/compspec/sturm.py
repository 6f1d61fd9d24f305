"""Exact real-root certificates for rational polynomials.

Everything here is Fraction arithmetic: Sturm chains, open-interval root
counts, isolation into exact roots (rational, quadratic) or sign-change
enclosures, refinement, and certified range containment.  No floating
point enters any certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import polynomials as poly
from .intervals import NEG_INF, POS_INF, Interval, ext_lt, is_finite
from .numbers import QuadraticNumber, quadratic, to_mpf


def eval_sign_at_infinity(p, positive: bool) -> int:
    lead = p[-1]
    if lead == 0:
        return 0
    if positive or (len(p) - 1) % 2 == 0:
        return 1 if lead > 0 else -1
    return -1 if lead > 0 else 1


def sign_at(p, x) -> int:
    if x is POS_INF:
        return eval_sign_at_infinity(p, True)
    if x is NEG_INF:
        return eval_sign_at_infinity(p, False)
    v = poly.eval_at(p, x)
    return -1 if v < 0 else (0 if v == 0 else 1)


def sturm_chain(p) -> list[list[Fraction]]:
    # Each remainder is divided by its positive content: scaling by a
    # positive rational preserves every sign in the chain, and keeps the
    # coefficient bit-length from exploding along the remainder sequence.
    p = poly.content_free(poly.normalize(p))
    chain = [p, poly.content_free(poly.derivative(p))]
    while poly.degree(chain[-1]) > 0:
        r = poly.pseudo_rem(chain[-2], chain[-1])
        if poly.is_zero(r):
            break
        chain.append(poly.content_free(poly.neg(r)))
    return chain


def sign_variations(chain, x) -> int:
    signs = [s for s in (sign_at(q, x) for q in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def deflate_rational_root(p, r: Fraction):
    """Divide out (x - r) once; r must be a root."""
    out = []
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * r + c
        out.append(acc)
    if acc != 0:
        raise ValueError("deflation at a non-root")
    return poly.normalize(list(reversed(out[:-1])))


def poly_gcd(p, q):
    a, b = poly.normalize(p), poly.normalize(q)
    if poly.is_zero(a):
        return b
    a, b = poly.content_free(a), poly.content_free(b)
    while not poly.is_zero(b) and poly.degree(b) > 0:
        a, b = b, poly.content_free(poly.pseudo_rem(a, b))
    if not poly.is_zero(b):
        return [Fraction(1)]
    return poly.scale(a, Fraction(1) / a[-1])


def squarefree_part(p):
    p = poly.normalize(p)
    if poly.degree(p) <= 1:
        return p
    g = poly_gcd(p, poly.derivative(p))
    if poly.degree(g) == 0:
        return p
    quotient, rem = divmod_poly(p, g)
    if not poly.is_zero(rem):
        raise ArithmeticError("gcd does not divide its polynomial")
    return quotient


def divmod_poly(p, q):
    p = list(poly.normalize(p))
    q = poly.normalize(q)
    dq, lead = poly.degree(q), q[-1]
    quotient = [Fraction(0)] * max(len(p) - dq, 1)
    while poly.degree(p) >= dq and not poly.is_zero(p):
        k = poly.degree(p) - dq
        f = p[-1] / lead
        quotient[k] = f
        for i, c in enumerate(q):
            p[i + k] -= f * c
        p = poly.normalize(p[:-1]) if len(p) > 1 else [Fraction(0)]
        if dq == 0:
            break
    return poly.normalize(quotient), poly.normalize(p)


def count_roots_open(p, interval: Interval) -> int:
    """Number of distinct real roots of p strictly inside the open interval."""
    p = poly.normalize(p)
    if poly.is_zero(p):
        raise ValueError("zero polynomial has no root count")
    if poly.degree(p) == 0:
        return 0
    lo, hi = interval.lower, interval.upper
    # Deflate roots sitting exactly on finite endpoints so the Sturm count
    # over (lo, hi] needs no further adjustment.
    for endpoint in (lo, hi):
        if is_finite(endpoint) and isinstance(endpoint, Fraction):
            while poly.degree(p) >= 1 and poly.eval_at(p, endpoint) == 0:
                p = deflate_rational_root(p, endpoint)
    if poly.degree(p) == 0:
        return 0
    chain = sturm_chain(p)
    n = sign_variations(chain, lo) - sign_variations(chain, hi)
    if is_finite(hi) and poly.eval_at(p, hi) == 0:
        n -= 1  # (lo, hi] counted the endpoint root
    return n


@dataclass(frozen=True)
class Enclosure:
    """Certified isolating interval: p carries a sign change over [lo, hi]."""

    lo: Fraction
    hi: Fraction
    p: tuple

    def refine(self, width: Fraction) -> "Enclosure":
        lo, hi = self.lo, self.hi
        p = list(self.p)
        s_lo = sign_at(p, lo)
        while hi - lo > width:
            mid = (lo + hi) / 2
            s_mid = sign_at(p, mid)
            while s_mid == 0:
                # Rational probe hit the root's value class boundary; nudge.
                mid = mid + (hi - lo) / 8
                s_mid = sign_at(p, mid)
            if s_mid == s_lo:
                lo = mid
            else:
                hi = mid
        return Enclosure(lo, hi, self.p)

    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def has_sign_change(self) -> bool:
        return sign_at(list(self.p), self.lo) * sign_at(list(self.p), self.hi) < 0

    def to_mpf(self):
        return (to_mpf(self.lo) + to_mpf(self.hi)) / 2

    def to_json_pair(self):
        """Exact rational endpoint pair."""
        from .numbers import format_rational
        return [format_rational(self.lo), format_rational(self.hi)]


def cauchy_bound(p) -> Fraction:
    lead = abs(p[-1])
    if len(p) == 1:
        return Fraction(1)
    return 1 + max(abs(c) for c in p[:-1]) / lead


_DIVISOR_BUDGET = 4096


def _divisors(n: int):
    n = abs(n)
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
        if len(out) > _DIVISOR_BUDGET:
            return None
    return out


def rational_roots(p) -> list[Fraction]:
    """All rational roots by divisor search; may miss roots only when the
    search space exceeds the budget (callers must tolerate that)."""
    q = poly.content_free(poly.normalize(p))
    roots = []
    while len(q) > 1 and q[0] == 0:
        q = q[1:]
        if Fraction(0) not in roots:
            roots.append(Fraction(0))
    if poly.degree(q) == 0:
        return roots
    nums = _divisors(int(q[0]))
    dens = _divisors(int(q[-1]))
    if nums is None or dens is None or len(nums) * len(dens) > _DIVISOR_BUDGET:
        candidates = {Fraction(k) for k in range(-8, 9)}
        candidates |= {Fraction(1, k) for k in range(2, 9)}
        candidates |= {Fraction(-1, k) for k in range(2, 9)}
    else:
        candidates = {Fraction(s * n, d) for n in nums for d in dens for s in (1, -1)}
    for cand in candidates:
        if poly.eval_at(q, cand) == 0 and cand not in roots:
            roots.append(cand)
    return sorted(roots)


def solve_quadratic_exact(p):
    """Exact real roots of a polynomial of degree <= 2, ascending."""
    p = poly.normalize(p)
    d = poly.degree(p)
    if d == 0:
        return []
    if d == 1:
        return [-p[0] / p[1]]
    a, b, c = p[2], p[1], p[0]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    if disc == 0:
        return [-b / (2 * a)]
    # sqrt(num/den) = sqrt(num*den)/den
    radicand = disc.numerator * disc.denominator
    spread = Fraction(1, disc.denominator) / (2 * a)
    roots = [quadratic(-b / (2 * a), -spread, radicand),
             quadratic(-b / (2 * a), spread, radicand)]
    return sorted(roots, key=_approx_key)


def _approx_key(r):
    with mpmath.workprec(128):
        if isinstance(r, Enclosure):
            return r.to_mpf()
        if isinstance(r, QuadraticNumber):
            return r.to_mpf()
        return to_mpf(r)


def root_multiplicity(p, r) -> int:
    """Multiplicity of an exact rational/quadratic root of p."""
    p = poly.normalize(p)
    k = 0
    while poly.degree(p) >= 1 and _is_exact_root(p, r):
        p = _deflate_exact(p, r)
        k += 1
    return k


def _is_exact_root(p, r) -> bool:
    v = poly.eval_at(p, r)
    if isinstance(v, QuadraticNumber):
        return v.sign() == 0
    return v == 0


def _deflate_exact(p, r):
    if isinstance(r, QuadraticNumber):
        minimal = poly.normalize([r.norm(), -2 * r.p, Fraction(1)])
        quotient, rem = divmod_poly(p, minimal)
        if not poly.is_zero(rem):
            raise ValueError("quadratic number is not a root")
        return quotient
    return deflate_rational_root(p, Fraction(r))


def isolate_roots(p, interval: Interval):
    """Distinct real roots of p in the open interval, with multiplicities.

    Returns [(root, multiplicity)] ascending, where root is a Fraction, a
    QuadraticNumber, or an Enclosure (sign-change certificate).
    """
    p = poly.normalize(p)
    if poly.is_zero(p):
        raise ValueError("zero polynomial")
    results = []
    work = list(p)
    for r in rational_roots(p):
        k = 0
        while poly.degree(work) >= 1 and poly.eval_at(work, r) == 0:
            work = deflate_rational_root(work, r)
            k += 1
        if k and interval.contains(r):
            results.append((r, k))
    if poly.degree(work) >= 1:
        sf = squarefree_part(work)
        if poly.degree(sf) <= 2:
            for r in solve_quadratic_exact(sf):
                if interval.contains(r):
                    results.append((r, root_multiplicity(work, r)))
        else:
            for enc in _isolate_by_bisection(sf, interval):
                if isinstance(enc, Fraction):
                    results.append((enc, root_multiplicity(work, enc)))
                else:
                    results.append((enc, _enclosure_multiplicity(work, enc)))
    return sorted(results, key=lambda rm: _approx_key(rm[0]))


def _enclosure_multiplicity(p, enc: Enclosure) -> int:
    mult = 1
    g = poly_gcd(p, poly.derivative(p))
    seg = Interval(enc.lo, enc.hi)
    while poly.degree(g) >= 1 and count_roots_open(g, seg) >= 1:
        mult += 1
        g = poly_gcd(g, poly.derivative(g))
    return mult


def _isolate_by_bisection(sf, interval: Interval):
    """Isolation for a squarefree polynomial of degree >= 3."""
    bound = cauchy_bound(sf)
    lo = interval.lower if is_finite(interval.lower) else -bound - 1
    hi = interval.upper if is_finite(interval.upper) else bound + 1
    lo, hi = Fraction(lo), Fraction(hi)
    found = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        if not a < b:
            continue
        n = count_roots_open(sf, Interval(a, b))
        if n == 0:
            continue
        if n > 1:
            mid = (a + b) / 2
            if poly.eval_at(sf, mid) == 0:
                found.append(mid)
            stack.append((a, mid))
            stack.append((mid, b))
            continue
        # Exactly one (simple) root: narrow to a sign-change bracket.
        aa, bb = a, b
        while True:
            sa, sb = sign_at(sf, aa), sign_at(sf, bb)
            if sa != 0 and sb != 0 and sa != sb:
                found.append(Enclosure(aa, bb, tuple(sf)))
                break
            mid = (aa + bb) / 2
            if poly.eval_at(sf, mid) == 0:
                found.append(mid)
                break
            if count_roots_open(sf, Interval(aa, mid)) == 1:
                bb = mid
            else:
                aa = mid
    return found


# ---------------------------------------------------------------------------
# Certified containment of polynomial images


def merge_open_union(union: list[Interval]) -> list[Interval]:
    if not union:
        return []
    parts = sorted(union, key=lambda iv: (is_finite(iv.lower),
                                          iv.lower if is_finite(iv.lower) else Fraction(0)))
    merged = [parts[0]]
    for iv in parts[1:]:
        last = merged[-1]
        if ext_lt(iv.lower, last.upper):
            if ext_lt(last.upper, iv.upper):
                merged[-1] = Interval(last.lower, iv.upper)
        else:
            merged.append(iv)
    return merged


def complement_blocks(union: list[Interval]):
    """Closed complement of a finite open union, as (lo, hi) blocks on the
    extended line; lo == hi encodes a single missing point."""
    merged = merge_open_union(union)
    if not merged:
        return [(NEG_INF, POS_INF)]
    blocks = []
    if is_finite(merged[0].lower):
        blocks.append((NEG_INF, merged[0].lower))
    for a, b in zip(merged, merged[1:]):
        blocks.append((a.upper, b.lower))
    if is_finite(merged[-1].upper):
        blocks.append((merged[-1].upper, POS_INF))
    return blocks


def poly_maps_into(p, source: Interval, targets: list[Interval]):
    """Certified check that p(source) lies inside the open target union.

    Returns (ok, witness): witness is a rational point of the source whose
    image provably leaves the union (or None).  The test is exact: the
    image, a connected set, meets a closed complement block iff it crosses
    one of the block's finite edges or a sample value sits inside it.
    """
    p = poly.normalize(p)
    mid = source.midpoint()
    p_mid = poly.eval_at(p, mid)
    for g1, g2 in complement_blocks(targets):
        if g1 is NEG_INF and g2 is POS_INF:
            return False, mid
        for g in (g1, g2):
            if is_finite(g):
                shifted = poly.sub(p, [Fraction(g)])
                if poly.is_zero(shifted):
                    return False, mid
                if count_roots_open(shifted, source) > 0:
                    return False, _crossing_witness(shifted, source)
        below = is_finite(g1) and p_mid < g1
        above = is_finite(g2) and p_mid > g2
        if not (below or above):
            return False, mid
    return True, None


def _crossing_witness(shifted, source: Interval) -> Fraction:
    roots = isolate_roots(shifted, source)
    root = roots[0][0] if roots else None
    if isinstance(root, Enclosure):
        return root.midpoint()
    if isinstance(root, QuadraticNumber):
        return source.midpoint()
    return root if root is not None else source.midpoint()
