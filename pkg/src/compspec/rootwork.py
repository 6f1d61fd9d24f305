"""Certified dynamics analysis of a symbol: fixed points of the map and
its second iterate, multipliers, critical points, diffeomorphism and
attraction-basin certificates.

Rational polynomial symbols get exact Sturm-based certificates; elementary
symbols get sign-scan heuristics and every derived flag records that the
result is not certified.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import polynomials as polylib
from . import sturm
from .errors import HypothesisViolation
from .intervals import NEG_INF, POS_INF, Interval, is_finite
from .numbers import QuadraticNumber, to_mpf
from .sturm import Enclosure
from .symbols import AnalyticSymbol, ConjugatedBody, _sample_grid

SUPERATTRACTING = "superattracting"
ATTRACTING = "attracting"
NEUTRAL = "neutral"
REPELLING = "repelling"
NEUTRAL_UNRESOLVED = "neutral?"

_REFINE_LIMIT = Fraction(1, 2 ** 512)


@dataclass(frozen=True)
class FixedPointRecord:
    """A certified (or scan-based) fixed point with its multiplier."""

    location: object          # Fraction | QuadraticNumber | Enclosure | mpf
    multiplier: object        # same exactness class as the location allows
    kind: str
    multiplicity: int = 1
    exact: bool = True

    def location_mpf(self, prec=64):
        with mpmath.workprec(prec):
            if isinstance(self.location, Enclosure):
                return self.location.to_mpf()
            return to_mpf(self.location)

    def same_point(self, other: "FixedPointRecord") -> bool:
        a, b = self.location, other.location
        if isinstance(a, Enclosure) and isinstance(b, Enclosure):
            return not (a.hi < b.lo or b.hi < a.lo)
        if isinstance(a, Enclosure):
            return _exact_in_enclosure(b, a)
        if isinstance(b, Enclosure):
            return _exact_in_enclosure(a, b)
        if isinstance(a, mpmath.mpf) or isinstance(b, mpmath.mpf):
            return abs(to_mpf(a) - to_mpf(b)) < mpmath.mpf(2) ** -40
        return a == b


def _exact_in_enclosure(value, enc: Enclosure) -> bool:
    if isinstance(value, mpmath.mpf):
        return to_mpf(enc.lo) <= value <= to_mpf(enc.hi)
    lo_ok = not (value < enc.lo)
    hi_ok = not (enc.hi < value)
    return lo_ok and hi_ok


class AllFixed:
    """Sentinel: the second iterate is the identity, every point is fixed."""

    def __repr__(self):
        return "AllFixed()"

    def __eq__(self, other):
        return isinstance(other, AllFixed)

    def __hash__(self):
        return hash("AllFixed")


@dataclass(frozen=True)
class DiffeoVerdict:
    value: object             # True | False | None (unknown)
    certificate: str
    certified: bool

    def __bool__(self):
        return self.value is True


@dataclass(frozen=True)
class BasinVerdict:
    status: str               # certified | sampled-true | false
    witness: object = None
    certified: bool = False
    note: str = ""


@dataclass(frozen=True)
class SymbolAnalysis:
    symbol: AnalyticSymbol
    fixed_points: list
    fixed_points_sq: object   # list | AllFixed
    critical_points: list
    is_diffeo: DiffeoVerdict
    sign_vs_id: object        # "above" | "below" | None
    critical_bounded_away: object  # True | False | None
    certified: bool
    is_identity: bool = False
    is_involution: bool = False

    def unique_sq_fixed_point(self):
        if isinstance(self.fixed_points_sq, AllFixed):
            return None
        if len(self.fixed_points_sq) == 1:
            return self.fixed_points_sq[0]
        return None


# ---------------------------------------------------------------------------
# Multipliers


def _interval_eval(p, lo: Fraction, hi: Fraction):
    """Range enclosure of p over [lo, hi] by interval Horner."""
    alo = ahi = Fraction(p[-1])
    for c in reversed(p[:-1]):
        products = (alo * lo, alo * hi, ahi * lo, ahi * hi)
        alo, ahi = min(products) + c, max(products) + c
    return alo, ahi


def _multiplier_exact(phi: AnalyticSymbol, location):
    dp = phi.derivative_polynomial()
    return polylib.eval_at(dp, location)


def _kind_from_exact(m) -> str:
    if isinstance(m, QuadraticNumber):
        mag = abs(m)
        if mag == 1:
            return NEUTRAL
        return ATTRACTING if mag < 1 else REPELLING
    if m == 0:
        return SUPERATTRACTING
    mag = abs(m)
    if mag == 1:
        return NEUTRAL
    return ATTRACTING if mag < 1 else REPELLING


def _multiplier_on_enclosure(phi: AnalyticSymbol, enc: Enclosure):
    """Multiplier data for an irrational enclosure root.

    Exact membership of the multiplier in {0, 1, -1} is decided through
    gcd certificates; otherwise the enclosure refines until the multiplier
    interval separates from those circles.
    """
    p_fix = polylib.sub(phi.rational_coeffs(), [Fraction(0), Fraction(1)])
    dp = phi.derivative_polynomial()
    for special, kind in ((Fraction(0), SUPERATTRACTING),
                          (Fraction(1), NEUTRAL), (Fraction(-1), NEUTRAL)):
        g = sturm.poly_gcd(p_fix, polylib.sub(dp, [special]))
        if polylib.degree(g) >= 1 and \
                sturm.count_roots_open(g, Interval(enc.lo, enc.hi)) >= 1:
            return special, kind, enc
    width = enc.hi - enc.lo
    current = enc
    while True:
        mlo, mhi = _interval_eval(dp, current.lo, current.hi)
        if mlo > 1 or mhi < -1:
            return (mlo, mhi), REPELLING, current
        if -1 < mlo and mhi < 1 and (mlo > 0 or mhi < 0):
            return (mlo, mhi), ATTRACTING, current
        if width <= _REFINE_LIMIT:
            return (mlo, mhi), NEUTRAL_UNRESOLVED, current
        width = width / 2 ** 16
        current = current.refine(max(width, _REFINE_LIMIT))


def _record_for_poly_root(phi: AnalyticSymbol, root, multiplicity) -> FixedPointRecord:
    if isinstance(root, Enclosure):
        multiplier, kind, refined = _multiplier_on_enclosure(phi, root)
        return FixedPointRecord(location=refined, multiplier=multiplier,
                                kind=kind, multiplicity=multiplicity, exact=True)
    m = _multiplier_exact(phi, root)
    return FixedPointRecord(location=root, multiplier=m,
                            kind=_kind_from_exact(m),
                            multiplicity=multiplicity, exact=True)


# ---------------------------------------------------------------------------
# Fixed points


def find_fixed_points(phi: AnalyticSymbol) -> list[FixedPointRecord]:
    """Fixed points of the symbol on its domain.

    Complete with exact multiplicities for rational polynomial symbols;
    scan-based and flagged inexact otherwise.
    """
    if phi.is_rational_polynomial():
        p = polylib.sub(phi.rational_coeffs(), [Fraction(0), Fraction(1)])
        if polylib.is_zero(p):
            raise ValueError("the identity fixes every point")
        return [_record_for_poly_root(phi, root, mult)
                for root, mult in sturm.isolate_roots(p, phi.domain)]
    return _scan_fixed_points(lambda x, prec: phi.eval(x, prec), phi)


def find_fixed_points_second_iterate(phi: AnalyticSymbol):
    """Fixed points of the second iterate; AllFixed for involutions.

    Two-cycles show up here as points not fixed by the symbol itself.
    """
    if phi.is_rational_polynomial():
        p2 = phi.second_iterate_polynomial()
        identity = [Fraction(0), Fraction(1)]
        if p2 == identity:
            return AllFixed()
        shifted = polylib.sub(p2, identity)
        records = []
        dp2 = polylib.derivative(p2)
        for root, mult in sturm.isolate_roots(shifted, phi.domain):
            if isinstance(root, Enclosure):
                rec = _second_iterate_enclosure_record(p2, dp2, root, mult)
            else:
                m = polylib.eval_at(dp2, root)
                rec = FixedPointRecord(location=root, multiplier=m,
                                       kind=_kind_from_exact(m),
                                       multiplicity=mult, exact=True)
            records.append(rec)
        return records
    if _looks_like_involution(phi):
        return AllFixed()
    return _scan_fixed_points(lambda x, prec: phi.eval(phi.eval(x, prec), prec), phi,
                              second_iterate_of=phi)


def _second_iterate_enclosure_record(p2, dp2, enc: Enclosure, mult):
    p_fix = polylib.sub(p2, [Fraction(0), Fraction(1)])
    for special, kind in ((Fraction(0), SUPERATTRACTING),
                          (Fraction(1), NEUTRAL), (Fraction(-1), NEUTRAL)):
        g = sturm.poly_gcd(p_fix, polylib.sub(dp2, [special]))
        if polylib.degree(g) >= 1 and \
                sturm.count_roots_open(g, Interval(enc.lo, enc.hi)) >= 1:
            return FixedPointRecord(enc, special, kind, mult, True)
    current, width = enc, enc.hi - enc.lo
    while True:
        mlo, mhi = _interval_eval(dp2, current.lo, current.hi)
        if mlo > 1 or mhi < -1:
            return FixedPointRecord(current, (mlo, mhi), REPELLING, mult, True)
        if -1 < mlo and mhi < 1 and (mlo > 0 or mhi < 0):
            return FixedPointRecord(current, (mlo, mhi), ATTRACTING, mult, True)
        if width <= _REFINE_LIMIT:
            return FixedPointRecord(current, (mlo, mhi), NEUTRAL_UNRESOLVED, mult, True)
        width = width / 2 ** 16
        current = current.refine(max(width, _REFINE_LIMIT))


def _looks_like_involution(phi: AnalyticSymbol) -> bool:
    with mpmath.workprec(96):
        for x in _sample_grid(phi.domain, 32):
            try:
                y = phi.eval(phi.eval(x, 96), 96)
            except Exception:
                return False
            if abs(to_mpf(y) - to_mpf(x)) > mpmath.mpf(2) ** -64:
                return False
    return True


def _scan_fixed_points(apply_fn, phi: AnalyticSymbol, second_iterate_of=None):
    """Sign-change scan with bisection refinement; flagged non-exhaustive."""
    grid = _sample_grid(phi.domain, 1024)
    records = []
    with mpmath.workprec(96):
        values = []
        for x in grid:
            try:
                values.append(to_mpf(apply_fn(to_mpf(x), 96)) - to_mpf(x))
            except Exception:
                values.append(None)
        for i, x in enumerate(grid):
            v = values[i]
            if v is None:
                continue
            if v == 0:
                records.append(_heuristic_record(phi, Fraction(x), second_iterate_of))
        def displacement(x):
            return to_mpf(apply_fn(x, 96)) - x

        for i in range(len(grid) - 1):
            a, b = grid[i], grid[i + 1]
            va, vb = values[i], values[i + 1]
            if va is None or vb is None or va == 0 or vb == 0:
                continue
            if (va < 0) != (vb < 0):
                root = _bisect_numeric(displacement, a, b, va)
                snapped = _snap_rational(apply_fn, root)
                records.append(_heuristic_record(
                    phi, snapped if snapped is not None else root, second_iterate_of))
    deduped = []
    for rec in records:
        if not any(rec.same_point(r) for r in deduped):
            deduped.append(rec)
    return deduped


def _bisect_numeric(g, a: Fraction, b: Fraction, va):
    """Numeric bisection for g(x) = 0 given a sign change on [a, b]."""
    lo, hi = to_mpf(a), to_mpf(b)
    sign_lo = va < 0
    for _ in range(200):
        mid = (lo + hi) / 2
        v = g(mid)
        if v == 0:
            return mid
        if (v < 0) == sign_lo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _snap_rational(apply_fn, root):
    """Try to replace a numeric root by a nearby small rational."""
    candidates = []
    for den in (1, 2, 3, 4, 6, 8, 12, 16):
        num = mpmath.nint(root * den)
        candidates.append(Fraction(int(num), den))
    for cand in candidates:
        if abs(to_mpf(cand) - root) < mpmath.mpf(2) ** -32:
            residual = to_mpf(apply_fn(to_mpf(cand), 96)) - to_mpf(cand)
            if residual == 0 or abs(residual) < mpmath.mpf(2) ** -88:
                return cand
    return None


def _heuristic_record(phi: AnalyticSymbol, location, second_iterate_of=None):
    prec = 96
    if second_iterate_of is not None:
        inner = second_iterate_of
        with mpmath.workprec(prec):
            mid = inner.eval(to_mpf(location), prec)
            m = inner.derivative_at(mid, prec) * inner.derivative_at(to_mpf(location), prec)
    else:
        jet = phi.jet(location, 1, precision=prec)
        m = jet.coeffs[1]
    exact_m = isinstance(m, (int, Fraction, QuadraticNumber))
    kind = _heuristic_kind(m, exact_m)
    return FixedPointRecord(location=location, multiplier=m, kind=kind,
                            multiplicity=1,
                            exact=False)


def _heuristic_kind(m, exact_m: bool) -> str:
    if exact_m:
        return _kind_from_exact(Fraction(m) if isinstance(m, int) else m)
    mag = abs(to_mpf(m))
    tol = mpmath.mpf(2) ** -40
    if mag < tol:
        return SUPERATTRACTING
    if abs(mag - 1) < tol:
        return NEUTRAL_UNRESOLVED
    return ATTRACTING if mag < 1 else REPELLING


# ---------------------------------------------------------------------------
# Critical points and diffeomorphism certificate


def find_critical_points(phi: AnalyticSymbol):
    if phi.is_rational_polynomial():
        dp = phi.derivative_polynomial()
        if polylib.degree(dp) == 0:
            return []
        return [root for root, _ in sturm.isolate_roots(dp, phi.domain)]
    roots = []
    grid = _sample_grid(phi.domain, 512)
    with mpmath.workprec(96):
        deriv = lambda x: to_mpf(phi.derivative_at(x, 96))
        values = [deriv(to_mpf(x)) for x in grid]
        for i in range(len(grid) - 1):
            va, vb = values[i], values[i + 1]
            if va == 0:
                roots.append(to_mpf(grid[i]))
                continue
            if (va < 0) != (vb < 0):
                roots.append(_bisect_numeric(deriv, grid[i], grid[i + 1], va))
    return roots


def is_diffeomorphism(phi: AnalyticSymbol) -> DiffeoVerdict:
    """True iff the derivative never vanishes on the domain and the map is
    onto the domain (endpoint limits reach the interval ends)."""
    if isinstance(phi.body, ConjugatedBody):
        inner = is_diffeomorphism(phi.body.inner)
        return DiffeoVerdict(inner.value,
                             f"conjugation-invariant: {inner.certificate}", False)
    if phi.is_rational_polynomial():
        dp = phi.derivative_polynomial()
        if polylib.degree(dp) == 0 and dp[0] == 0:
            return DiffeoVerdict(False, "derivative vanishes identically", True)
        if sturm.count_roots_open(dp, phi.domain) > 0:
            return DiffeoVerdict(False, "critical point inside the domain", True)
        onto, certified = _onto_check(phi)
        if onto is True:
            return DiffeoVerdict(True, "monotone with limits onto the ends", certified)
        if onto is False:
            return DiffeoVerdict(False, "image does not fill the interval", certified)
        return DiffeoVerdict(None, "endpoint limits unresolved", False)
    crit = find_critical_points(phi)
    if crit:
        return DiffeoVerdict(False, "critical point found by scan", False)
    onto, _ = _onto_check(phi)
    if onto is True:
        return DiffeoVerdict(True, "monotone with limits onto the ends (sampled)", False)
    if onto is False:
        return DiffeoVerdict(False, "image does not fill the interval", False)
    return DiffeoVerdict(None, "endpoint limits unresolved", False)


def _onto_check(phi: AnalyticSymbol):
    lo_lim = phi.limit_at(phi.domain.lower)
    hi_lim = phi.limit_at(phi.domain.upper)
    increasing = _is_increasing(phi)
    if increasing is None:
        return None, False
    want_lo, want_hi = (phi.domain.lower, phi.domain.upper)
    if not increasing:
        lo_lim, hi_lim = hi_lim, lo_lim
    certified = phi.is_rational_polynomial()
    for lim, end in ((lo_lim, want_lo), (hi_lim, want_hi)):
        if lim.kind == "unknown" or lim.kind == "bounded":
            return None, False
        if end is POS_INF:
            if lim.kind != "pos_inf":
                return False, certified or lim.kind == "finite"
        elif end is NEG_INF:
            if lim.kind != "neg_inf":
                return False, certified or lim.kind == "finite"
        else:
            if lim.kind in ("pos_inf", "neg_inf"):
                return False, certified
            if lim.exact:
                if lim.value != Fraction(end):
                    return False, certified
            else:
                if abs(lim.approx - to_mpf(Fraction(end))) > mpmath.mpf(2) ** -40:
                    return False, False
                certified = False
    return True, certified


def _is_increasing(phi: AnalyticSymbol):
    if phi.is_rational_polynomial():
        dp = phi.derivative_polynomial()
        mid = phi.domain.midpoint()
        v = polylib.eval_at(dp, mid)
        if v == 0:
            return None
        return v > 0
    with mpmath.workprec(64):
        v = phi.derivative_at(to_mpf(phi.domain.midpoint()), 64)
        if v == 0:
            return None
        return v > 0


def critical_set_bounded_away(phi: AnalyticSymbol, end: str):
    """Whether the critical set stays away from the chosen end ("upper" or
    "lower") of the domain.  Exact for polynomials (finitely many critical
    points); scan-based for elementary symbols."""
    if phi.is_rational_polynomial():
        return True
    crit = find_critical_points(phi)
    if not crit:
        return True
    bound = phi.domain.upper if end == "upper" else phi.domain.lower
    if is_finite(bound):
        return None
    # Infinite end: check a tail beyond the outermost found critical point.
    tail_start = max(crit) if end == "upper" else min(crit)
    with mpmath.workprec(64):
        sign = None
        for k in range(1, 33):
            x = tail_start + k * 4 if end == "upper" else tail_start - k * 4
            d = to_mpf(phi.derivative_at(x, 64))
            s = 1 if d > 0 else (-1 if d < 0 else 0)
            if s == 0:
                return None
            if sign is None:
                sign = s
            elif sign != s:
                return None
    return True


# ---------------------------------------------------------------------------
# Attraction basins


def attraction_basin_check(phi: AnalyticSymbol, core: Interval,
                           max_depth: int = 10_000, samples: int = 64) -> BasinVerdict:
    """Certify (or sample) that the whole domain is attracted into the core.

    Hypothesis: the core is invariant with closure inside the domain.
    The certified path needs a rational polynomial symbol, no fixed points
    outside the core, inward-pointing displacement signs, and image bounds
    that prevent jumping across the core.
    """
    _require_core_hypothesis(phi, core)
    if phi.is_rational_polynomial():
        verdict = _certified_basin(phi, core)
        if verdict is not None:
            return verdict
    witness = _sampled_basin_witness(phi, core, max_depth, samples)
    if witness is None:
        return BasinVerdict("sampled-true", certified=False,
                            note=f"all {samples} samples entered the core")
    point, proven = witness
    return BasinVerdict("false", witness=point, certified=proven,
                        note="orbit provably escapes" if proven
                        else "orbit failed to enter the core")


def _require_core_hypothesis(phi: AnalyticSymbol, core: Interval):
    if not phi.domain.contains_interval(core):
        raise HypothesisViolation("core closure must sit inside the domain")
    if phi.is_rational_polynomial():
        ok, witness = sturm.poly_maps_into(phi.rational_coeffs(), core, [core])
        if not ok:
            raise HypothesisViolation(f"core is not invariant (witness x={witness})")
        return
    with mpmath.workprec(64):
        for x in _sample_grid(core, 128):
            y = to_mpf(phi.eval(x, 64))
            if is_finite(core.lower) and y < to_mpf(Fraction(core.lower)):
                raise HypothesisViolation(f"core is not invariant (witness x={x})")
            if is_finite(core.upper) and y > to_mpf(Fraction(core.upper)):
                raise HypothesisViolation(f"core is not invariant (witness x={x})")


def _certified_basin(phi: AnalyticSymbol, core: Interval):
    p = phi.rational_coeffs()
    displacement = polylib.sub(p, [Fraction(0), Fraction(1)])
    domain = phi.domain
    regions = []
    if is_finite(core.upper) and (not is_finite(domain.upper)
                                  or core.upper < domain.upper):
        regions.append(("upper", Interval(core.upper, domain.upper)))
    if is_finite(core.lower) and (not is_finite(domain.lower)
                                  or domain.lower < core.lower):
        regions.append(("lower", Interval(domain.lower, core.lower)))
    for side, region in regions:
        edge = core.upper if side == "upper" else core.lower
        if polylib.eval_at(displacement, Fraction(edge)) == 0:
            return None  # fixed point pinned to the core edge
        n_fixed = sturm.count_roots_open(displacement, region)
        if n_fixed > 0:
            return _escape_witness(phi, displacement, region, side)
        sample = region.midpoint()
        inward = polylib.eval_at(displacement, sample) < 0 if side == "upper" \
            else polylib.eval_at(displacement, sample) > 0
        if not inward:
            return _escape_witness(phi, displacement, region, side)
        # Jump bound: the image of the outer region must not cross to the
        # far side of the core (and must stay inside the domain).
        target_lo = core.lower if side == "upper" else domain.lower
        target_hi = domain.upper if side == "upper" else core.upper
        ok, _ = sturm.poly_maps_into(p, region, [Interval(target_lo, target_hi)])
        if not ok:
            return None
    return BasinVerdict("certified", certified=True,
                        note="no outside fixed points, inward displacement, "
                             "jump-safe image bounds")


def _rational_bound_beyond(root, side: str) -> Fraction:
    """A rational point strictly past an exact or enclosed root."""
    if isinstance(root, Enclosure):
        return root.hi if side == "upper" else root.lo
    if isinstance(root, QuadraticNumber):
        with mpmath.workprec(64):
            seed = int(mpmath.floor(root.to_mpf()))
        cand = Fraction(seed if side == "lower" else seed + 1)
        step = Fraction(1 if side == "upper" else -1)
        while (cand <= root) if side == "upper" else (cand >= root):
            cand += step
        return cand
    return Fraction(root)


def _escape_witness(phi: AnalyticSymbol, displacement, region: Interval, side: str):
    """A point beyond every outer fixed point whose orbit provably moves
    away from the core forever, or None if no such certificate applies."""
    roots = sturm.isolate_roots(displacement, region)
    bounds = [_rational_bound_beyond(r, side) for r, _ in roots]
    if side == "upper":
        base = max(bounds) if bounds else Fraction(region.lower)
        if is_finite(region.upper):
            if not base < Fraction(region.upper):
                return None
            candidate = (base + Fraction(region.upper)) / 2
        else:
            candidate = base + 1
        moving_away = polylib.eval_at(displacement, candidate) > 0
    else:
        base = min(bounds) if bounds else Fraction(region.upper)
        if is_finite(region.lower):
            if not Fraction(region.lower) < base:
                return None
            candidate = (Fraction(region.lower) + base) / 2
        else:
            candidate = base - 1
        moving_away = polylib.eval_at(displacement, candidate) < 0
    if any((candidate <= r) if side == "upper" else (candidate >= r)
           for r in bounds):
        return None
    if moving_away:
        # Monotone escape: no fixed points beyond the candidate, so the
        # orbit never re-enters the core.
        return BasinVerdict("false", witness=candidate, certified=True,
                            note="orbit moves monotonically away from the core")
    return None


def _sampled_basin_witness(phi: AnalyticSymbol, core: Interval,
                           max_depth: int, samples: int):
    grid = _sample_grid(phi.domain, samples)
    extra = [Fraction(k) for k in (-2, -1, 1, 2) if phi.domain.contains(Fraction(k))]
    with mpmath.workprec(64):
        big = mpmath.mpf(2) ** 256
        for start in list(grid) + extra:
            x = to_mpf(start)
            entered = False
            for _ in range(max_depth):
                if _inside_core(x, core):
                    entered = True
                    break
                try:
                    x = to_mpf(phi.eval(x, 64))
                except Exception:
                    return start, True
                if abs(x) > big:
                    return start, _escape_is_certain(phi, start)
            if not entered:
                return start, False
    return None


def _inside_core(x, core: Interval) -> bool:
    lo_ok = not is_finite(core.lower) or x > to_mpf(Fraction(core.lower))
    hi_ok = not is_finite(core.upper) or x < to_mpf(Fraction(core.upper))
    return lo_ok and hi_ok


def _escape_is_certain(phi: AnalyticSymbol, start) -> bool:
    if not phi.is_rational_polynomial() or not isinstance(start, (int, Fraction)):
        return False
    displacement = polylib.sub(phi.rational_coeffs(), [Fraction(0), Fraction(1)])
    v = polylib.eval_at(displacement, Fraction(start))
    if v > 0:
        region = Interval(Fraction(start), phi.domain.upper) \
            if phi.domain.contains(Fraction(start)) else None
        return region is not None and sturm.count_roots_open(displacement, region) == 0
    if v < 0:
        region = Interval(phi.domain.lower, Fraction(start)) \
            if phi.domain.contains(Fraction(start)) else None
        return region is not None and sturm.count_roots_open(displacement, region) == 0
    return False


# ---------------------------------------------------------------------------
# Full analysis


def analyze_symbol(phi: AnalyticSymbol) -> SymbolAnalysis:
    """Assemble the dynamics facts the classifier consumes."""
    if isinstance(phi.body, ConjugatedBody):
        return _conjugated_analysis(phi)
    is_identity = phi.is_identity()
    if is_identity:
        return SymbolAnalysis(symbol=phi, fixed_points=[], fixed_points_sq=AllFixed(),
                              critical_points=[],
                              is_diffeo=DiffeoVerdict(True, "identity", True),
                              sign_vs_id=None, critical_bounded_away=None,
                              certified=True, is_identity=True, is_involution=False)
    fixed = find_fixed_points(phi)
    fixed_sq = find_fixed_points_second_iterate(phi)
    involution = isinstance(fixed_sq, AllFixed)
    critical = find_critical_points(phi)
    diffeo = is_diffeomorphism(phi)
    sign_vs_id = None
    bounded_away = None
    if not fixed:
        sign_vs_id = _sign_against_identity(phi)
        end = "upper" if sign_vs_id == "above" else "lower"
        bounded_away = critical_set_bounded_away(phi, end)
    certified = (phi.invariance_certified and diffeo.certified
                 and phi.is_rational_polynomial()
                 and all(r.exact for r in fixed)
                 and (involution or all(r.exact for r in fixed_sq)))
    return SymbolAnalysis(symbol=phi, fixed_points=fixed, fixed_points_sq=fixed_sq,
                          critical_points=critical, is_diffeo=diffeo,
                          sign_vs_id=sign_vs_id,
                          critical_bounded_away=bounded_away,
                          certified=certified, is_identity=False,
                          is_involution=involution)


def _sign_against_identity(phi: AnalyticSymbol):
    if phi.is_rational_polynomial():
        displacement = polylib.sub(phi.rational_coeffs(), [Fraction(0), Fraction(1)])
        v = polylib.eval_at(displacement, phi.domain.midpoint())
        return "above" if v > 0 else "below"
    with mpmath.workprec(64):
        x = to_mpf(phi.domain.midpoint())
        v = to_mpf(phi.eval(x, 64)) - x
        return "above" if v > 0 else "below"


def _conjugated_analysis(phi: AnalyticSymbol) -> SymbolAnalysis:
    body = phi.body
    inner = analyze_symbol(body.inner)
    change = body.change
    prec = 96

    def pull_back(record: FixedPointRecord) -> FixedPointRecord:
        with mpmath.workprec(prec):
            loc = change.apply_inverse(record.location_mpf(prec), prec)
        return FixedPointRecord(location=loc, multiplier=record.multiplier,
                                kind=record.kind, multiplicity=record.multiplicity,
                                exact=False)

    fixed = [pull_back(r) for r in inner.fixed_points]
    fixed_sq = inner.fixed_points_sq if isinstance(inner.fixed_points_sq, AllFixed) \
        else [pull_back(r) for r in inner.fixed_points_sq]
    with mpmath.workprec(prec):
        critical = [change.apply_inverse(
            c.to_mpf() if isinstance(c, Enclosure) else to_mpf(c), prec)
            for c in inner.critical_points]
    return SymbolAnalysis(symbol=phi, fixed_points=fixed, fixed_points_sq=fixed_sq,
                          critical_points=critical,
                          is_diffeo=DiffeoVerdict(inner.is_diffeo.value,
                                                  "conjugation-invariant", False),
                          sign_vs_id=inner.sign_vs_id,
                          critical_bounded_away=inner.critical_bounded_away,
                          certified=False, is_identity=inner.is_identity,
                          is_involution=inner.is_involution)
