"""Spectral classification of composition operators from a symbol analysis.

The decision tree routes through the fixed-point taxonomy: identity,
fixed-point-free maps, involutions, pure powers, unique second-iterate
fixed points (attracting / repelling), the quadratic family, and multiple
fixed points.  Every leaf reports structured set expressions for the
spectrum and point spectrum, eigenspace dimension rules, and the case
label with its source citations.  Unresolvable branches return explicit
supersets rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import mpmath

from . import sturm
from .errors import HypothesisViolation, InvarianceFailure, UnresolvedVerdict
from .intervals import Interval, intersect_unions, is_finite, union_covers
from .numbers import (GaussianRational, QuadraticNumber, format_scalar,
                      parse_scalar, to_mpf)
from .rootwork import (ATTRACTING, NEUTRAL_UNRESOLVED, REPELLING,
                       SUPERATTRACTING, SymbolAnalysis, analyze_symbol)
from .symbols import (AnalyticSymbol, ConjugatedBody, NoFixedPoints,
                      normalize_quadratic)

REPORT_VERSION = 1


def _as_exact(value):
    if isinstance(value, int):
        return Fraction(value)
    return value


def _is_real_scalar(value) -> bool:
    return isinstance(value, (int, Fraction, QuadraticNumber))


def _real_part(lam):
    if isinstance(lam, GaussianRational):
        return lam.re if lam.im == 0 else None
    return _as_exact(lam)


def _scalar_eq(a, b) -> bool:
    a, b = _as_exact(a), _as_exact(b)
    if isinstance(a, GaussianRational) or isinstance(b, GaussianRational):
        ga = a if isinstance(a, GaussianRational) else None
        gb = b if isinstance(b, GaussianRational) else None
        if ga is not None and gb is not None:
            return ga == gb
        gr, other = (ga, b) if ga is not None else (gb, a)
        return gr == other
    return a == b


def _abs_cmp_one(value) -> int:
    """Sign of |value| - 1 for an exact real scalar."""
    v = _as_exact(value)
    if isinstance(v, QuadraticNumber):
        mag = abs(v)
        if mag == 1:
            return 0
        return -1 if mag < 1 else 1
    mag = abs(v)
    return -1 if mag < 1 else (0 if mag == 1 else 1)


# ---------------------------------------------------------------------------
# Spectral set expressions


@dataclass(frozen=True)
class AllPlane:
    kind = "all_plane"

    def contains(self, lam) -> bool:
        return True

    def to_json_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class PuncturedPlane:
    kind = "punctured_plane"

    def contains(self, lam) -> bool:
        return not _scalar_eq(lam, Fraction(0))

    def to_json_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Powers:
    """{ratio**n : n >= 0}, optionally together with 0 (closure point)."""

    ratio: object
    include_zero: bool = False

    def __post_init__(self):
        if _scalar_eq(self.ratio, Fraction(0)):
            raise ValueError("zero ratio: use a finite set instead")

    kind = "powers"

    def contains(self, lam) -> bool:
        if self.include_zero and _scalar_eq(lam, Fraction(0)):
            return True
        real = _real_part(lam)
        if real is None:
            return False
        if _scalar_eq(real, Fraction(1)):
            return True
        ratio = _as_exact(self.ratio)
        side = _abs_cmp_one(ratio)
        if side == 0:
            return _scalar_eq(real, ratio)  # ratio is +-1; 1 handled above
        power = ratio
        guard = 0
        while guard < 4096:
            cmp = _mag_compare(power, real)
            if cmp == 0 and _scalar_eq(power, real):
                return True
            if side > 0 and cmp > 0:
                return False
            if side < 0 and cmp < 0:
                return False
            power = power * ratio
            guard += 1
        return False

    def to_json_dict(self):
        return {"kind": self.kind, "ratio": format_scalar(self.ratio),
                "include_zero": self.include_zero}


def _mag_compare(a, b) -> int:
    """Sign of |a| - |b| for exact real scalars."""
    a, b = abs(_as_exact(a)), abs(_as_exact(b))
    if isinstance(a, QuadraticNumber) or isinstance(b, QuadraticNumber):
        if isinstance(a, QuadraticNumber):
            return a._cmp(b)
        return -(b._cmp(a))
    return -1 if a < b else (0 if a == b else 1)


@dataclass(frozen=True)
class FiniteSet:
    values: tuple

    kind = "finite"

    def contains(self, lam) -> bool:
        return any(_scalar_eq(lam, v) for v in self.values)

    def to_json_dict(self):
        return {"kind": self.kind,
                "values": [format_scalar(v) for v in self.values]}


@dataclass(frozen=True)
class ClosedDisk:
    radius: Fraction

    kind = "closed_disk"

    def contains(self, lam) -> bool:
        r2 = self.radius * self.radius
        if isinstance(lam, GaussianRational):
            return lam.abs2() <= r2
        lam = _as_exact(lam)
        if isinstance(lam, QuadraticNumber):
            return abs(lam) <= self.radius
        return lam * lam <= r2

    def to_json_dict(self):
        return {"kind": self.kind, "radius": format_scalar(self.radius)}


@dataclass(frozen=True)
class RealRay:
    start: Fraction
    closed: bool = True

    kind = "real_ray"

    def contains(self, lam) -> bool:
        real = _real_part(lam)
        if real is None:
            return False
        if isinstance(real, QuadraticNumber):
            return real >= self.start if self.closed else real > self.start
        return real >= self.start if self.closed else real > self.start

    def to_json_dict(self):
        return {"kind": self.kind, "from": format_scalar(self.start),
                "closed": self.closed}


@dataclass(frozen=True)
class SetUnion:
    parts: tuple

    kind = "union"

    def contains(self, lam) -> bool:
        return any(p.contains(lam) for p in self.parts)

    def to_json_dict(self):
        return {"kind": self.kind, "parts": [p.to_json_dict() for p in self.parts]}


@dataclass(frozen=True)
class SupersetOf:
    """The spectrum contains the union of the parts; the rest is open."""

    parts: tuple

    kind = "superset_of"

    def contains(self, lam) -> bool:
        """Membership in the certified lower bound only."""
        return any(p.contains(lam) for p in self.parts)

    def to_json_dict(self):
        return {"kind": self.kind, "parts": [p.to_json_dict() for p in self.parts]}


_SET_KINDS = {}


def set_expr_from_json(doc):
    kind = doc["kind"]
    if kind == "all_plane":
        return AllPlane()
    if kind == "punctured_plane":
        return PuncturedPlane()
    if kind == "powers":
        return Powers(parse_scalar(doc["ratio"]), doc["include_zero"])
    if kind == "finite":
        return FiniteSet(tuple(parse_scalar(v) for v in doc["values"]))
    if kind == "closed_disk":
        return ClosedDisk(Fraction(parse_scalar(doc["radius"])))
    if kind == "real_ray":
        return RealRay(Fraction(parse_scalar(doc["from"])), doc["closed"])
    if kind == "union":
        return SetUnion(tuple(set_expr_from_json(p) for p in doc["parts"]))
    if kind == "superset_of":
        return SupersetOf(tuple(set_expr_from_json(p) for p in doc["parts"]))
    raise ValueError(f"unknown set expression kind {kind!r}")


# ---------------------------------------------------------------------------
# Eigenspace dimension rules


@dataclass(frozen=True)
class DimZero:
    kind = "zero"

    def to_json_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class DimFinite:
    k: int

    kind = "finite"

    def to_json_dict(self):
        return {"kind": self.kind, "k": self.k}


@dataclass(frozen=True)
class DimInfinite:
    tag: str  # "A(T)" | "A_+(R)" | "A(J)"

    kind = "infinite"

    def to_json_dict(self):
        return {"kind": self.kind, "tag": self.tag}


@dataclass(frozen=True)
class DimWholeSpace:
    kind = "whole_space"

    def to_json_dict(self):
        return {"kind": self.kind}


def _dim_from_json(doc):
    if doc["kind"] == "zero":
        return DimZero()
    if doc["kind"] == "finite":
        return DimFinite(doc["k"])
    if doc["kind"] == "infinite":
        return DimInfinite(doc["tag"])
    return DimWholeSpace()


@dataclass(frozen=True)
class EigenRule:
    matcher: tuple  # ("equals", value) | ("in_set", values) | ("power_of", ratio) | ("nonzero",) | ("otherwise",)
    dim: object

    def matches(self, lam) -> bool:
        tag = self.matcher[0]
        if tag == "equals":
            return _scalar_eq(lam, self.matcher[1])
        if tag == "in_set":
            return any(_scalar_eq(lam, v) for v in self.matcher[1])
        if tag == "power_of":
            return Powers(self.matcher[1]).contains(lam)
        if tag == "nonzero":
            return not _scalar_eq(lam, Fraction(0))
        return True

    def to_json_dict(self):
        tag = self.matcher[0]
        if tag == "equals":
            when = {"when": tag, "value": format_scalar(self.matcher[1])}
        elif tag == "in_set":
            when = {"when": tag, "values": [format_scalar(v) for v in self.matcher[1]]}
        elif tag == "power_of":
            when = {"when": tag, "ratio": format_scalar(self.matcher[1])}
        else:
            when = {"when": tag}
        when["dim"] = self.dim.to_json_dict()
        return when


def eigen_rule_from_json(doc):
    tag = doc["when"]
    if tag == "equals":
        matcher = ("equals", parse_scalar(doc["value"]))
    elif tag == "in_set":
        matcher = ("in_set", tuple(parse_scalar(v) for v in doc["values"]))
    elif tag == "power_of":
        matcher = ("power_of", parse_scalar(doc["ratio"]))
    else:
        matcher = (tag,)
    return EigenRule(matcher, _dim_from_json(doc["dim"]))


class EigenDim:
    """Ordered first-match rules mapping an eigenvalue to a dimension."""

    __slots__ = ("rules",)

    def __init__(self, rules):
        self.rules = tuple(rules)

    def dimension(self, lam):
        for rule in self.rules:
            if rule.matches(lam):
                return rule.dim
        raise UnresolvedVerdict("no eigen rule fired")

    def __eq__(self, other):
        return isinstance(other, EigenDim) and self.rules == other.rules

    def __hash__(self):
        return hash(self.rules)

    def to_json_list(self):
        return [r.to_json_dict() for r in self.rules]

    @classmethod
    def from_json_list(cls, docs):
        return cls([eigen_rule_from_json(d) for d in docs])


def _eigen_constants_only():
    return EigenDim([EigenRule(("equals", Fraction(1)), DimFinite(1)),
                     EigenRule(("otherwise",), DimZero())])


# ---------------------------------------------------------------------------
# Classification report


@dataclass(frozen=True)
class ClassificationReport:
    case_id: str
    sigma_p: object
    sigma: object
    eigen: EigenDim
    resolved: bool
    open_problem: object
    certified: bool
    citations: tuple
    notes: tuple = ()

    def to_json_dict(self):
        return {
            "version": REPORT_VERSION,
            "case": self.case_id,
            "sigma": self.sigma.to_json_dict(),
            "sigma_p": self.sigma_p.to_json_dict(),
            "eigen": self.eigen.to_json_list(),
            "resolved": self.resolved,
            "open_problem": self.open_problem,
            "certified": self.certified,
            "citations": list(self.citations),
            "notes": list(self.notes),
        }

    @classmethod
    def from_json_dict(cls, doc):
        return cls(case_id=doc["case"],
                   sigma_p=set_expr_from_json(doc["sigma_p"]),
                   sigma=set_expr_from_json(doc["sigma"]),
                   eigen=EigenDim.from_json_list(doc["eigen"]),
                   resolved=doc["resolved"],
                   open_problem=doc["open_problem"],
                   certified=doc["certified"],
                   citations=tuple(doc["citations"]),
                   notes=tuple(doc["notes"]))


# ---------------------------------------------------------------------------
# Point spectrum (the five-way split)


def _base_multiplier(analysis: SymbolAnalysis):
    """Multiplier of the symbol at the unique second-iterate fixed point."""
    sq = analysis.unique_sq_fixed_point()
    if sq is None:
        return None, None
    for record in analysis.fixed_points:
        if record.same_point(sq):
            return record.multiplier, record.kind
    return sq.multiplier, sq.kind


def point_spectrum(analysis: SymbolAnalysis):
    """sigma_p and eigenspace dimensions from the fixed-point taxonomy."""
    if analysis.is_identity:
        return (FiniteSet((Fraction(1),)),
                EigenDim([EigenRule(("equals", Fraction(1)), DimWholeSpace()),
                          EigenRule(("otherwise",), DimZero())]))
    if not analysis.fixed_points:
        # A fixed-point-free map lies strictly on one side of the identity,
        # so its second iterate is fixed-point-free too (no 2-cycles).
        if analysis.critical_bounded_away is True:
            return (PuncturedPlane(),
                    EigenDim([EigenRule(("nonzero",), DimInfinite("A(T)")),
                              EigenRule(("otherwise",), DimZero())]))
        if analysis.critical_bounded_away is None:
            raise UnresolvedVerdict("critical-set tail behaviour undecided")
        return (FiniteSet((Fraction(1),)), _eigen_constants_only())
    if analysis.is_involution and not analysis.is_identity:
        values = (Fraction(-1), Fraction(1))
        return (FiniteSet(values),
                EigenDim([EigenRule(("in_set", values), DimInfinite("A_+(R)")),
                          EigenRule(("otherwise",), DimZero())]))
    m, kind = _base_multiplier(analysis)
    if m is not None:
        if kind == NEUTRAL_UNRESOLVED:
            raise UnresolvedVerdict("multiplier enclosure straddles modulus one")
        exact = _is_real_scalar(m)
        if kind == ATTRACTING and exact:
            return (Powers(_as_exact(m), include_zero=False),
                    EigenDim([EigenRule(("power_of", _as_exact(m)), DimFinite(1)),
                              EigenRule(("otherwise",), DimZero())]))
        if kind == REPELLING and exact and not analysis.critical_points:
            return (Powers(_as_exact(m), include_zero=False),
                    EigenDim([EigenRule(("power_of", _as_exact(m)), DimFinite(1)),
                              EigenRule(("otherwise",), DimZero())]))
        if kind in (ATTRACTING, REPELLING) and not exact:
            raise UnresolvedVerdict("multiplier known only as an enclosure")
    return (FiniteSet((Fraction(1),)), _eigen_constants_only())


# ---------------------------------------------------------------------------
# Spectrum lower bound


def spectrum_lower_bound(analysis: SymbolAnalysis):
    """Union of {0} (non-diffeomorphism), the point spectrum, and the
    multiplier power sets at fixed points with non-neutral multipliers."""
    parts = []
    if analysis.is_diffeo.value is not True:
        parts.append(FiniteSet((Fraction(0),)))
    try:
        sigma_p, _ = point_spectrum(analysis)
        parts.append(sigma_p)
    except UnresolvedVerdict:
        parts.append(FiniteSet((Fraction(1),)))
    for record in analysis.fixed_points:
        m = record.multiplier
        if not _is_real_scalar(m):
            continue
        m = _as_exact(m)
        if _scalar_eq(m, Fraction(0)) or _abs_cmp_one(m) == 0:
            continue
        candidate = Powers(m)
        if not any(candidate == p for p in parts):
            parts.append(candidate)
    return SetUnion(tuple(parts))


# ---------------------------------------------------------------------------
# The classification decision tree


def spectrum(target) -> ClassificationReport:
    """Full classification of a symbol (or precomputed analysis).

    Total: every branch returns a report; branches the sources leave open
    return explicit supersets with resolved=False.
    """
    if isinstance(target, AnalyticSymbol):
        if isinstance(target.body, ConjugatedBody):
            inner = spectrum(target.body.inner)
            return replace(inner, certified=False)
        analysis = analyze_symbol(target)
    else:
        analysis = target
        if isinstance(analysis.symbol.body, ConjugatedBody):
            inner = spectrum(analysis.symbol.body.inner)
            return replace(inner, certified=False)
    certified = analysis.certified

    if analysis.is_identity:
        sigma_p, eigen = point_spectrum(analysis)
        return ClassificationReport(
            case_id="Thm 2.2(b3)", sigma_p=sigma_p, sigma=FiniteSet((Fraction(1),)),
            eigen=eigen, resolved=True, open_problem=None, certified=certified,
            citations=("Thm 2.2(b3)",),
            notes=("identity symbol: the operator is the identity",))

    if not analysis.fixed_points:
        return _no_fixed_point_leaf(analysis, certified)

    if analysis.is_involution:
        sigma_p, eigen = point_spectrum(analysis)
        return ClassificationReport(
            case_id="Thm 2.2(b2)", sigma_p=sigma_p, sigma=sigma_p, eigen=eigen,
            resolved=True, open_problem=None, certified=certified,
            citations=("Thm 2.2(b2)", "Prop 2.1(1)"),
            notes=("derived rule: (C - lam)(C + lam) = (1 - lam^2) I inverts "
                   "the resolvent for lam outside {-1, 1}",))

    power = analysis.symbol.affine_power_exponent()
    if power is not None:
        return ClassificationReport(
            case_id="Prop 3.12", sigma_p=FiniteSet((Fraction(1),)),
            sigma=AllPlane(), eigen=_eigen_constants_only(), resolved=True,
            open_problem=None, certified=certified,
            citations=("Prop 3.12", "Lemma 3.13", "Prop 2.1", "Thm 3.11"),
            notes=(f"affinely equivalent to the power map with exponent {power}",))

    unique_sq = analysis.unique_sq_fixed_point()
    if unique_sq is not None:
        return _unique_fixed_point_leaf(analysis, certified)

    return _several_fixed_points_leaf(analysis, certified)


def _no_fixed_point_leaf(analysis, certified) -> ClassificationReport:
    diffeo = analysis.is_diffeo.value
    if diffeo is True:
        return ClassificationReport(
            case_id="Cor 3.1(a)", sigma_p=PuncturedPlane(), sigma=PuncturedPlane(),
            eigen=EigenDim([EigenRule(("nonzero",), DimInfinite("A(T)")),
                            EigenRule(("otherwise",), DimZero())]),
            resolved=True, open_problem=None, certified=certified,
            citations=("Cor 3.1(a)", "Thm 2.2(a)"), notes=())
    if diffeo is False and analysis.critical_bounded_away is True:
        return ClassificationReport(
            case_id="Cor 3.1(b)", sigma_p=PuncturedPlane(), sigma=AllPlane(),
            eigen=EigenDim([EigenRule(("nonzero",), DimInfinite("A(T)")),
                            EigenRule(("otherwise",), DimZero())]),
            resolved=True, open_problem=None, certified=certified,
            citations=("Cor 3.1(b)", "Thm 2.2(a)", "Prop 2.1(1)"), notes=())
    if analysis.critical_bounded_away is False:
        sigma_p = FiniteSet((Fraction(1),))
        note = "critical set not bounded away from the relevant end"
    else:
        sigma_p = SupersetOf((FiniteSet((Fraction(1),)),))
        note = "critical-set tail behaviour undecided"
    return ClassificationReport(
        case_id="Problem 3.2", sigma_p=sigma_p,
        sigma=SupersetOf((FiniteSet((Fraction(0), Fraction(1))),)),
        eigen=_eigen_constants_only(),
        resolved=False, open_problem="Problem 3.2", certified=certified,
        citations=("Problem 3.2", "Thm 2.2(c)", "Prop 2.1(1)"),
        notes=(note,))


def _unique_fixed_point_leaf(analysis, certified) -> ClassificationReport:
    m, kind = _base_multiplier(analysis)
    diffeo = analysis.is_diffeo.value
    exact = _is_real_scalar(m)
    if kind == NEUTRAL_UNRESOLVED or not exact:
        return _fallback_leaf(analysis, certified,
                              note="multiplier undecided at modulus one")
    m = _as_exact(m)
    side = _abs_cmp_one(m) if not _scalar_eq(m, Fraction(0)) else -1
    if kind == SUPERATTRACTING or _scalar_eq(m, Fraction(0)):
        sigma = FiniteSet((Fraction(1), Fraction(0)))
        return ClassificationReport(
            case_id="Cor 3.6", sigma_p=FiniteSet((Fraction(1),)), sigma=sigma,
            eigen=_eigen_constants_only(), resolved=True, open_problem=None,
            certified=certified, citations=("Cor 3.6", "Thm 2.2(c)", "Prop 2.1(1)"),
            notes=("superattracting fixed point: powers collapse to {1, 0}",))
    if side < 0:
        include_zero = diffeo is not True
        sigma_p, eigen = point_spectrum(analysis)
        return ClassificationReport(
            case_id="Cor 3.6", sigma_p=sigma_p,
            sigma=Powers(m, include_zero=include_zero), eigen=eigen,
            resolved=True, open_problem=None,
            certified=certified and diffeo is not None,
            citations=("Cor 3.6", "Thm 2.2(b1)", "Prop 2.1(1)"), notes=())
    if side == 0:
        quad = _quadratic_data(analysis.symbol)
        if quad is not None:
            return _quadratic_from_symbol(analysis, certified)
        return _fallback_leaf(analysis, certified, note="neutral multiplier")
    # repelling
    sigma_p, eigen = point_spectrum(analysis)
    if diffeo is True:
        return ClassificationReport(
            case_id="Cor 3.7", sigma_p=sigma_p, sigma=Powers(m), eigen=eigen,
            resolved=True, open_problem=None, certified=certified,
            citations=("Cor 3.7", "Thm 2.2(b1)"), notes=())
    parts = (FiniteSet((Fraction(0),)), Powers(m))
    return ClassificationReport(
        case_id="Problem 3.8", sigma_p=sigma_p, sigma=SupersetOf(parts),
        eigen=eigen, resolved=False, open_problem="Problem 3.8",
        certified=certified,
        citations=("Problem 3.8", "Prop 2.1", "Thm 2.2"), notes=())


def _quadratic_data(symbol: AnalyticSymbol):
    if not symbol.is_rational_polynomial():
        return None
    coeffs = symbol.rational_coeffs()
    if len(coeffs) != 3:
        return None
    c, b, a = coeffs
    return a, b, c


def _quadratic_from_symbol(analysis, certified) -> ClassificationReport:
    a, b, c = _quadratic_data(analysis.symbol)
    normal = normalize_quadratic(a, b, c)
    if isinstance(normal, NoFixedPoints):
        return _no_fixed_point_leaf(analysis, certified)
    return quadratic_spectrum(normal.mu, certified=certified)


def quadratic_spectrum(mu, *, certified=True) -> ClassificationReport:
    """Classification of the normal form -x^2 + mu*x by parameter ranges:
    the parabolic case (partial ray), the full-plane band 1 < mu <= 2, and
    the partial disk-and-powers superset for mu > 2."""
    mu = _as_exact(mu)
    if mu < 1:
        raise ValueError("normal form parameter must be at least 1")
    is_one, le_two = mu == 1, mu <= 2
    eigen = _eigen_constants_only()
    if is_one:
        sigma = SupersetOf((FiniteSet((Fraction(0),)), RealRay(Fraction(1), True)))
        return ClassificationReport(
            case_id="Prop 4.1", sigma_p=FiniteSet((Fraction(1),)), sigma=sigma,
            eigen=eigen, resolved=False, open_problem="Prop 4.1 partial",
            certified=certified,
            citations=("Prop 4.1", "Prop 2.1(1)", "Thm 2.2(c)"),
            notes=("divergence certificate available for real lam > 1 with "
                   "identity right-hand side",))
    if le_two:
        return ClassificationReport(
            case_id="Prop 4.4", sigma_p=FiniteSet((Fraction(1),)), sigma=AllPlane(),
            eigen=eigen, resolved=True, open_problem=None, certified=certified,
            citations=("Prop 4.4", "Thm 3.11", "Thm 2.2"),
            notes=("kernel dimensions reported per Thm 2.2; the source text "
                   "asserts one-dimensional kernels for every lam, which "
                   "conflicts with its own point spectrum {1}",))
    parts = (ClosedDisk(Fraction(1)), Powers(mu), Powers(2 - mu))
    return ClassificationReport(
        case_id="Prop 4.5", sigma_p=FiniteSet((Fraction(1),)),
        sigma=SupersetOf(parts), eigen=eigen, resolved=False,
        open_problem="Prop 4.5 partial", certified=certified,
        citations=("Prop 4.5", "Prop 2.1", "Thm 2.2(c)"),
        notes=("power sets with neutral ratio stay inside the closed disk",))


def _several_fixed_points_leaf(analysis, certified) -> ClassificationReport:
    quad = _quadratic_data(analysis.symbol)
    if quad is not None:
        return _quadratic_from_symbol(analysis, certified)
    diffeo = analysis.is_diffeo.value
    multipliers_ok = all(
        _is_real_scalar(r.multiplier)
        and not _scalar_eq(_as_exact(r.multiplier), Fraction(0))
        and _abs_cmp_one(_as_exact(r.multiplier)) != 0
        for r in analysis.fixed_points)
    if diffeo is True and len(analysis.fixed_points) > 1 and multipliers_ok:
        return ClassificationReport(
            case_id="Prop 3.9", sigma_p=FiniteSet((Fraction(1),)),
            sigma=PuncturedPlane(), eigen=_eigen_constants_only(),
            resolved=True, open_problem=None, certified=certified,
            citations=("Prop 3.9", "Thm 2.2(c)", "Prop 2.1(1)"), notes=())
    return _fallback_leaf(analysis, certified,
                          note="no classification leaf applies")


def _fallback_leaf(analysis, certified, note) -> ClassificationReport:
    lower = spectrum_lower_bound(analysis)
    try:
        sigma_p, eigen = point_spectrum(analysis)
    except UnresolvedVerdict:
        sigma_p, eigen = FiniteSet((Fraction(1),)), _eigen_constants_only()
    return ClassificationReport(
        case_id="partial lower bound", sigma_p=sigma_p,
        sigma=SupersetOf(tuple(lower.parts)), eigen=eigen, resolved=False,
        open_problem=None, certified=certified,
        citations=("Prop 2.1", "Thm 2.2"), notes=(note,))


# ---------------------------------------------------------------------------
# Kernel dimensions on invariant intervals


@dataclass(frozen=True)
class KernelDimLabel:
    finite: bool
    value: object  # int when finite, tag string when infinite

    @classmethod
    def of_finite(cls, k: int):
        return cls(True, k)

    @classmethod
    def of_infinite(cls, tag: str):
        return cls(False, tag)

    def to_json_dict(self):
        if self.finite:
            return {"kind": "finite", "k": self.value}
        return {"kind": "infinite", "tag": self.value}

    def __str__(self):
        return f"Finite({self.value})" if self.finite else f"Infinite({self.value})"


def _check_invariant_interval(phi: AnalyticSymbol, targets: list[Interval],
                              source: Interval):
    if phi.is_rational_polynomial():
        ok, witness = sturm.poly_maps_into(phi.rational_coeffs(), source, targets)
        if not ok:
            raise InvarianceFailure(
                f"image of {source} leaves the piece", witness=witness)
        return True
    from .symbols import _sample_grid
    with mpmath.workprec(64):
        for x in _sample_grid(source, 256):
            y = to_mpf(phi.eval(x, 64))
            if not any(_numeric_in(y, t) for t in targets):
                raise InvarianceFailure(f"sampled image point leaves the piece",
                                        witness=x)
    return False


def _numeric_in(y, interval: Interval) -> bool:
    lo_ok = not is_finite(interval.lower) or y > to_mpf(Fraction(interval.lower))
    hi_ok = not is_finite(interval.upper) or y < to_mpf(Fraction(interval.upper))
    return lo_ok and hi_ok


def kernel_dim(phi: AnalyticSymbol, region: Interval, lam) -> KernelDimLabel:
    """dim ker(C - lam I) on real analytic functions over the invariant
    region, per the fixed-point taxonomy of the restricted symbol."""
    _check_invariant_interval(phi, [region], region)
    restricted = phi.with_domain(region)
    analysis = analyze_symbol(restricted)
    if _scalar_eq(lam, Fraction(0)):
        m, kind = _base_multiplier(analysis)
        if kind == SUPERATTRACTING:
            return KernelDimLabel.of_finite(1)
        return KernelDimLabel.of_finite(0)
    if analysis.is_identity:
        return KernelDimLabel.of_infinite("A(J)") if _scalar_eq(lam, Fraction(1)) \
            else KernelDimLabel.of_finite(0)
    sigma_p, eigen = point_spectrum(analysis)
    dim = eigen.dimension(lam)
    if isinstance(dim, DimZero):
        return KernelDimLabel.of_finite(0)
    if isinstance(dim, DimFinite):
        return KernelDimLabel.of_finite(dim.k)
    if isinstance(dim, DimWholeSpace):
        return KernelDimLabel.of_infinite("A(J)")
    return KernelDimLabel.of_infinite(dim.tag)


# ---------------------------------------------------------------------------
# Covering obstruction


@dataclass(frozen=True)
class CoverPiece:
    """An invariant open piece: one interval or a union of two, with the
    interval that determines kernel elements (reflection/preimage rules
    from the construction, declared, not guessed)."""

    intervals: tuple
    determining: Interval = None
    note: str = ""

    def __post_init__(self):
        if self.determining is None:
            if len(self.intervals) != 1:
                raise ValueError("multi-interval pieces must declare the "
                                 "determining interval")
            object.__setattr__(self, "determining", self.intervals[0])

    def label(self) -> str:
        return " U ".join(str(iv) for iv in self.intervals)


@dataclass(frozen=True)
class CoveringObstruction:
    pieces: tuple
    lam: object
    piece_kernels: tuple
    intersection_kernels: tuple  # ((i, j, interval, label), ...)
    verdict: str                 # "NotSurjective" | "Inconclusive"
    invariance_certified: bool

    def to_json_dict(self):
        return {
            "lambda": str(self.lam),
            "pieces": [{"intervals": [str(iv) for iv in p.intervals],
                        "determining": str(p.determining),
                        "note": p.note,
                        "kernel": k.to_json_dict()}
                       for p, k in zip(self.pieces, self.piece_kernels)],
            "intersections": [{"pair": [i, j], "region": str(region),
                               "kernel": label.to_json_dict()}
                              for i, j, region, label in self.intersection_kernels],
            "verdict": self.verdict,
            "invariance_certified": self.invariance_certified,
        }


def covering_obstruction(phi: AnalyticSymbol, lam, pieces) -> CoveringObstruction:
    """Compare kernel dimensions on invariant pieces against pairwise
    intersections; all pieces finite with some infinite intersection rules
    out surjectivity of C - lam I."""
    pieces = tuple(pieces)
    all_intervals = [iv for p in pieces for iv in p.intervals]
    if not union_covers(all_intervals, phi.domain):
        raise HypothesisViolation("pieces do not cover the domain")
    certified = True
    for piece in pieces:
        for component in piece.intervals:
            certified &= _check_invariant_interval(phi, list(piece.intervals),
                                                   component)
    piece_kernels = tuple(kernel_dim(phi, p.determining, lam) for p in pieces)
    inter_kernels = []
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            overlap = intersect_unions(list(pieces[i].intervals),
                                       list(pieces[j].intervals))
            if not overlap:
                continue
            det = intersect_unions([pieces[i].determining],
                                   [pieces[j].determining])
            region = det[0] if det else overlap[0]
            inter_kernels.append((i, j, region, kernel_dim(phi, region, lam)))
    all_finite = all(k.finite for k in piece_kernels)
    some_infinite = any(not label.finite for _, _, _, label in inter_kernels)
    verdict = "NotSurjective" if (all_finite and some_infinite) else "Inconclusive"
    return CoveringObstruction(pieces=pieces, lam=lam,
                               piece_kernels=piece_kernels,
                               intersection_kernels=tuple(inter_kernels),
                               verdict=verdict,
                               invariance_certified=certified)
