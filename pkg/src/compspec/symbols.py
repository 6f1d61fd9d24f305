"""Real analytic self-maps of an interval: parsing, evaluation, Taylor
jets, iteration, conjugation, and the quadratic normal form.

Grammar (see the package README): polynomials over exact rationals plus
``exp``, ``arctan`` and ``sin`` nodes.  A symbol whose expression tree is
polynomial after constant folding is stored as an exact coefficient list;
everything else is kept as a folded tree and handled numerically, with
exact jets whenever every transcendental node is expanded at an argument
value of zero.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import polynomials as polylib
from . import sturm
from .config import default_precision
from .errors import (ConstantSymbolError, DomainError, ExpressionSyntaxError,
                     NotADiffeomorphism, OrbitEscape)
from .intervals import NEG_INF, POS_INF, Interval, is_finite
from .numbers import QuadraticNumber, format_rational, parse_rational, to_mpf
from .power_series import TruncatedSeries

_GUARD_BITS = 24


# ---------------------------------------------------------------------------
# Expression trees


@dataclass(frozen=True)
class Poly:
    coeffs: tuple


@dataclass(frozen=True)
class Add:
    parts: tuple


@dataclass(frozen=True)
class Mul:
    parts: tuple


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    fn: str  # exp | arctan | sin
    arg: object


_SPECIAL_AT_ZERO = {"exp": Fraction(1), "arctan": Fraction(0), "sin": Fraction(0)}


def _padd(a, b):
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _split_scalar(node):
    """Split a rational prefactor off a folded non-polynomial node."""
    if isinstance(node, Mul) and isinstance(node.parts[0], Poly) \
            and len(node.parts[0].coeffs) == 1:
        rest = node.parts[1:]
        core = rest[0] if len(rest) == 1 else Mul(rest)
        return node.parts[0].coeffs[0], core
    return Fraction(1), node


def fold(node):
    """Bottom-up constant folding and like-term collection.

    Polynomial subtrees collapse into ``Poly`` nodes; transcendental calls
    at argument zero take their exact special value.
    """
    if isinstance(node, Poly):
        return node
    if isinstance(node, Add):
        parts = []
        for raw in node.parts:
            f = fold(raw)
            parts.extend(f.parts if isinstance(f, Add) else [f])
        acc = [Fraction(0)]
        groups: dict = {}
        order = []
        for f in parts:
            if isinstance(f, Poly):
                acc = _padd(acc, list(f.coeffs))
                continue
            coeff, core = _split_scalar(f)
            if core not in groups:
                groups[core] = Fraction(0)
                order.append(core)
            groups[core] += coeff
        rest = []
        for core in order:
            c = groups[core]
            if c == 0:
                continue
            rest.append(core if c == 1 else Mul((Poly((c,)), core)))
        if not rest:
            return Poly(tuple(acc))
        out = list(rest)
        if not (len(acc) == 1 and acc[0] == 0):
            out = [Poly(tuple(acc))] + out
        return out[0] if len(out) == 1 else Add(tuple(out))
    if isinstance(node, Mul):
        parts = []
        for raw in node.parts:
            f = fold(raw)
            parts.extend(f.parts if isinstance(f, Mul) else [f])
        acc = [Fraction(1)]
        rest = []
        for f in parts:
            if isinstance(f, Poly):
                acc = _pmul(acc, list(f.coeffs))
            else:
                rest.append(f)
        if len(acc) == 1 and acc[0] == 0:
            return Poly((Fraction(0),))
        if not rest:
            return Poly(tuple(acc))
        if len(acc) == 1 and acc[0] == 1:
            return rest[0] if len(rest) == 1 else Mul(tuple(rest))
        return Mul((Poly(tuple(acc)),) + tuple(rest))
    if isinstance(node, Pow):
        base = fold(node.base)
        n = node.exponent
        if n == 0:
            return Poly((Fraction(1),))
        if n == 1:
            return base
        if isinstance(base, Poly):
            out = [Fraction(1)]
            for _ in range(n):
                out = _pmul(out, list(base.coeffs))
            return Poly(tuple(out))
        if isinstance(base, Pow):
            return Pow(base.base, base.exponent * n)
        return Pow(base, n)
    if isinstance(node, Call):
        arg = fold(node.arg)
        if isinstance(arg, Poly) and len(arg.coeffs) == 1 and arg.coeffs[0] == 0:
            return Poly((_SPECIAL_AT_ZERO[node.fn],))
        return Call(node.fn, arg)
    raise TypeError(f"unknown node {node!r}")


def tree_has_variable(node) -> bool:
    if isinstance(node, Poly):
        return len(node.coeffs) > 1
    if isinstance(node, Add):
        return any(tree_has_variable(p) for p in node.parts)
    if isinstance(node, Mul):
        return any(tree_has_variable(p) for p in node.parts)
    if isinstance(node, Pow):
        return tree_has_variable(node.base)
    return tree_has_variable(node.arg)


def substitute_affine(node, scale: Fraction, offset: Fraction):
    """Replace the variable by scale*x + offset; stays inside the grammar."""
    if isinstance(node, Poly):
        out = [Fraction(0)]
        inner = [offset, scale]
        for c in reversed(node.coeffs):
            out = _padd(_pmul(out, inner), [c])
        return Poly(tuple(out))
    if isinstance(node, Add):
        return Add(tuple(substitute_affine(p, scale, offset) for p in node.parts))
    if isinstance(node, Mul):
        return Mul(tuple(substitute_affine(p, scale, offset) for p in node.parts))
    if isinstance(node, Pow):
        return Pow(substitute_affine(node.base, scale, offset), node.exponent)
    return Call(node.fn, substitute_affine(node.arg, scale, offset))


# ---------------------------------------------------------------------------
# Parser


_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)|(?P<name>[A-Za-z_]+)"
                       r"|(?P<op>[-+*^()/]))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m or m.end() == pos:
                if text[pos:].strip():
                    raise ExpressionSyntaxError(
                        f"unexpected character {text[pos]!r}", pos)
                break
            if m.lastgroup or m.group().strip():
                kind = ("num" if m.group("num") else
                        "name" if m.group("name") else "op")
                self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.index = 0

    def peek(self):
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        self.index += 1
        return tok

    def expect_op(self, op):
        kind, value, pos = self.next()
        if kind != "op" or value != op:
            raise ExpressionSyntaxError(f"expected {op!r}", pos)

    def parse(self):
        node = self.parse_expr()
        kind, value, pos = self.peek()
        if kind is not None:
            raise ExpressionSyntaxError(f"unexpected trailing {value!r}", pos)
        return node

    def parse_expr(self):
        terms = []
        kind, value, _ = self.peek()
        sign = Fraction(1)
        if kind == "op" and value in "+-":
            self.next()
            if value == "-":
                sign = Fraction(-1)
        first = self.parse_term()
        terms.append(first if sign == 1 else Mul((Poly((sign,)), first)))
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.next()
                term = self.parse_term()
                terms.append(term if value == "+" else Mul((Poly((Fraction(-1),)), term)))
            else:
                break
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def parse_term(self):
        factors = [self.parse_factor()]
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "*":
                self.next()
                factors.append(self.parse_factor())
            else:
                break
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def parse_factor(self):
        base = self.parse_base()
        kind, value, pos = self.peek()
        if kind == "op" and value == "^":
            self.next()
            kind, value, pos = self.next()
            if kind != "num" or "." in value:
                raise ExpressionSyntaxError("exponent must be a nonnegative integer", pos)
            return Pow(base, int(value))
        return base

    def parse_base(self):
        kind, value, pos = self.next()
        if kind == "num":
            frac = parse_rational(value)
            nkind, nvalue, _ = self.peek()
            if "." not in value and nkind == "op" and nvalue == "/":
                # rational literal p/q
                self.next()
                dkind, dvalue, dpos = self.next()
                if dkind != "num" or "." in dvalue:
                    raise ExpressionSyntaxError("denominator must be a positive integer", dpos)
                if int(dvalue) == 0:
                    raise ExpressionSyntaxError("zero denominator", dpos)
                frac = Fraction(int(value), int(dvalue))
            return Poly((frac,))
        if kind == "name":
            if value == "x":
                return Poly((Fraction(0), Fraction(1)))
            if value in ("exp", "arctan", "sin"):
                self.expect_op("(")
                arg = self.parse_expr()
                self.expect_op(")")
                return Call(value, arg)
            raise ExpressionSyntaxError(f"unknown name {value!r}", pos)
        if kind == "op" and value == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ExpressionSyntaxError(f"unexpected token {value!r}", pos)


# ---------------------------------------------------------------------------
# Numeric tree evaluation and jets


def eval_tree(node, x):
    """Evaluate a folded tree at an mpf point, inside a workprec context."""
    if isinstance(node, Poly):
        acc = None
        for c in reversed(node.coeffs):
            acc = (to_mpf(c) if acc is None else acc * x + c)
        return acc
    if isinstance(node, Add):
        total = mpmath.mpf(0)
        for p in node.parts:
            total += eval_tree(p, x)
        return total
    if isinstance(node, Mul):
        total = mpmath.mpf(1)
        for p in node.parts:
            total *= eval_tree(p, x)
        return total
    if isinstance(node, Pow):
        return eval_tree(node.base, x) ** node.exponent
    value = eval_tree(node.arg, x)
    if node.fn == "exp":
        return mpmath.exp(value)
    if node.fn == "arctan":
        return mpmath.atan(value)
    return mpmath.sin(value)


class _NeedNumeric(Exception):
    """Raised by exact jets when a transcendental node sits off zero."""


def _series_from_poly(coeffs, center, order):
    ident = TruncatedSeries.identity(center, order)
    acc = TruncatedSeries.zero(center, order)
    for c in reversed(coeffs):
        acc = acc * ident + c
    return acc


def _series_exp(g: TruncatedSeries, exact: bool):
    g0 = g.coeffs[0]
    if exact:
        if g0 != 0:
            raise _NeedNumeric
        e0 = Fraction(1)
    else:
        e0 = mpmath.exp(g0)
    n = g.order
    h = g.coeffs
    out = [e0]
    for m in range(1, n + 1):
        acc = 0
        for k in range(1, m + 1):
            acc = acc + k * h[k] * out[m - k]
        out.append(_divide(acc, m))
    return TruncatedSeries(g.center, out)


def _series_sin(g: TruncatedSeries, exact: bool):
    g0 = g.coeffs[0]
    if exact:
        if g0 != 0:
            raise _NeedNumeric
        s0, c0 = Fraction(0), Fraction(1)
    else:
        s0, c0 = mpmath.sin(g0), mpmath.cos(g0)
    n = g.order
    h = g.coeffs
    sins, coss = [s0], [c0]
    for m in range(1, n + 1):
        acc_s = 0
        acc_c = 0
        for k in range(1, m + 1):
            acc_s = acc_s + k * h[k] * coss[m - k]
            acc_c = acc_c + k * h[k] * sins[m - k]
        sins.append(_divide(acc_s, m))
        coss.append(_divide(-acc_c, m))
    return TruncatedSeries(g.center, sins)


def _series_arctan(g: TruncatedSeries, exact: bool):
    g0 = g.coeffs[0]
    if exact:
        if g0 != 0:
            raise _NeedNumeric
        a0 = Fraction(0)
    else:
        a0 = mpmath.atan(g0)
    if g.order == 0:
        return TruncatedSeries(g.center, [a0])
    denom = (g * g + 1).truncate(g.order - 1)
    integrand = g.differentiate() * denom.reciprocal()
    return integrand.integrate(a0).truncate(g.order)


def _divide(value, k: int):
    if isinstance(value, (int, Fraction)):
        return Fraction(value) / k
    return value / k


def tree_jet(node, center, order, exact: bool):
    if isinstance(node, Poly):
        return _series_from_poly(node.coeffs, center, order)
    if isinstance(node, Add):
        acc = TruncatedSeries.zero(center, order)
        for p in node.parts:
            acc = acc + tree_jet(p, center, order, exact)
        return acc
    if isinstance(node, Mul):
        acc = None
        for p in node.parts:
            term = tree_jet(p, center, order, exact)
            acc = term if acc is None else acc * term
        return acc
    if isinstance(node, Pow):
        return tree_jet(node.base, center, order, exact).power(node.exponent)
    inner = tree_jet(node.arg, center, order, exact)
    if node.fn == "exp":
        return _series_exp(inner, exact)
    if node.fn == "sin":
        return _series_sin(inner, exact)
    return _series_arctan(inner, exact)


# ---------------------------------------------------------------------------
# Limits at interval ends


@dataclass(frozen=True)
class Limit:
    kind: str  # finite | pos_inf | neg_inf | bounded | unknown
    value: object = None   # exact Fraction when known exactly
    approx: object = None  # mpf estimate when finite but inexact

    @property
    def exact(self) -> bool:
        return self.kind == "finite" and self.value is not None

    def sign(self):
        if self.kind == "pos_inf":
            return 1
        if self.kind == "neg_inf":
            return -1
        if self.exact:
            return -1 if self.value < 0 else (0 if self.value == 0 else 1)
        if self.kind == "finite":
            return -1 if self.approx < 0 else (0 if self.approx == 0 else 1)
        return None


_UNKNOWN = Limit("unknown")
_BOUNDED = Limit("bounded")


def _poly_limit(coeffs, end):
    if end is POS_INF or end is NEG_INF:
        if len(coeffs) == 1:
            value = coeffs[0]
            if isinstance(value, (int, Fraction)):
                return Limit("finite", value=Fraction(value))
            return Limit("finite", approx=to_mpf(value))
        lead = coeffs[-1]
        lead_sign = 1 if _scalar_positive(lead) else -1
        if end is NEG_INF and (len(coeffs) - 1) % 2 == 1:
            lead_sign = -lead_sign
        return Limit("pos_inf") if lead_sign > 0 else Limit("neg_inf")
    end = Fraction(end) if isinstance(end, int) else end
    if all(isinstance(c, (int, Fraction)) for c in coeffs) and isinstance(end, Fraction):
        return Limit("finite",
                     value=polylib.eval_at([Fraction(c) for c in coeffs], end))
    with mpmath.workprec(96):
        acc = None
        for c in reversed(coeffs):
            acc = to_mpf(c) if acc is None else acc * to_mpf(end) + to_mpf(c)
    return Limit("finite", approx=acc)


def tree_limit(node, end):
    if isinstance(node, Poly):
        return _poly_limit(node.coeffs, end)
    if isinstance(node, (Add, Mul)) and isinstance(end, Fraction):
        with mpmath.workprec(96):
            return Limit("finite", approx=eval_tree(node, to_mpf(end)))
    if isinstance(node, Add):
        finite_exact = Fraction(0)
        finite_ok = True
        approx = mpmath.mpf(0)
        pos = neg = bounded = False
        for p in node.parts:
            lim = tree_limit(p, end)
            if lim.kind == "unknown":
                return _UNKNOWN
            elif lim.kind == "pos_inf":
                pos = True
            elif lim.kind == "neg_inf":
                neg = True
            elif lim.kind == "bounded":
                bounded = True
            else:
                if lim.exact:
                    finite_exact += lim.value
                else:
                    finite_ok = False
                    approx += lim.approx
        if pos and neg:
            return _UNKNOWN
        if pos:
            return Limit("pos_inf")
        if neg:
            return Limit("neg_inf")
        if bounded:
            return _BOUNDED
        if finite_ok:
            return Limit("finite", value=finite_exact)
        return Limit("finite", approx=approx + to_mpf(finite_exact))
    if isinstance(node, Mul):
        sign = 1
        inf = False
        bounded = False
        finite_exact = Fraction(1)
        finite_ok = True
        approx = mpmath.mpf(1)
        for p in node.parts:
            lim = tree_limit(p, end)
            if lim.kind == "unknown":
                return _UNKNOWN
            if lim.kind == "bounded":
                bounded = True
                continue
            if lim.kind in ("pos_inf", "neg_inf"):
                inf = True
                sign *= 1 if lim.kind == "pos_inf" else -1
                continue
            s = lim.sign()
            if s == 0:
                if inf:
                    return _UNKNOWN
                return Limit("finite", value=Fraction(0)) if lim.exact else _UNKNOWN
            sign *= s
            if lim.exact:
                finite_exact *= lim.value
            else:
                finite_ok = False
                approx *= lim.approx
        if inf:
            if bounded:
                return _UNKNOWN
            return Limit("pos_inf") if sign > 0 else Limit("neg_inf")
        if bounded:
            return _BOUNDED
        if finite_ok:
            return Limit("finite", value=finite_exact)
        return Limit("finite", approx=approx * to_mpf(finite_exact))
    if isinstance(node, Pow):
        base = tree_limit(node.base, end)
        n = node.exponent
        if base.kind == "unknown":
            return _UNKNOWN
        if base.kind == "bounded":
            return _BOUNDED
        if base.kind in ("pos_inf", "neg_inf"):
            if base.kind == "neg_inf" and n % 2 == 1:
                return Limit("neg_inf")
            return Limit("pos_inf")
        if base.exact:
            return Limit("finite", value=base.value ** n)
        return Limit("finite", approx=base.approx ** n)
    # Call node
    arg = tree_limit(node.arg, end)
    if arg.kind == "unknown":
        return _UNKNOWN
    if node.fn == "exp":
        if arg.kind == "pos_inf":
            return Limit("pos_inf")
        if arg.kind == "neg_inf":
            return Limit("finite", value=Fraction(0))
        if arg.kind == "bounded":
            return _BOUNDED
        if arg.exact and arg.value == 0:
            return Limit("finite", value=Fraction(1))
        with mpmath.workprec(96):
            return Limit("finite", approx=mpmath.exp(_limit_mpf(arg)))
    if node.fn == "arctan":
        if arg.kind == "pos_inf":
            return Limit("finite", approx=+mpmath.pi / 2)
        if arg.kind == "neg_inf":
            return Limit("finite", approx=-mpmath.pi / 2)
        if arg.kind == "bounded":
            return _BOUNDED
        if arg.exact and arg.value == 0:
            return Limit("finite", value=Fraction(0))
        with mpmath.workprec(96):
            return Limit("finite", approx=mpmath.atan(_limit_mpf(arg)))
    if arg.kind in ("pos_inf", "neg_inf", "bounded"):
        return _BOUNDED
    if arg.exact and arg.value == 0:
        return Limit("finite", value=Fraction(0))
    with mpmath.workprec(96):
        return Limit("finite", approx=mpmath.sin(_limit_mpf(arg)))


def _limit_mpf(lim: Limit):
    return to_mpf(lim.value) if lim.exact else lim.approx


# ---------------------------------------------------------------------------
# Symbol bodies


@dataclass(frozen=True)
class PolynomialBody:
    coeffs: tuple  # ascending; Fraction entries, QuadraticNumber allowed

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_rational(self):
        return all(isinstance(c, (int, Fraction)) for c in self.coeffs)


@dataclass(frozen=True)
class ElementaryBody:
    tree: object


@dataclass(frozen=True)
class ConjugatedBody:
    inner: "AnalyticSymbol"
    change: "Diffeomorphism"


def _sample_grid(domain: Interval, count: int) -> list[Fraction]:
    lo, hi = domain.lower, domain.upper
    points = []
    if is_finite(lo) and is_finite(hi):
        lo, hi = Fraction(lo), Fraction(hi)
        step = (hi - lo) / (count + 1)
        points = [lo + step * k for k in range(1, count + 1)]
    elif is_finite(lo):
        lo = Fraction(lo)
        for k in range(1, count + 1):
            t = Fraction(k, count + 1)
            points.append(lo + t / (1 - t))
    elif is_finite(hi):
        hi = Fraction(hi)
        for k in range(1, count + 1):
            t = Fraction(k, count + 1)
            points.append(hi - t / (1 - t))
    else:
        for k in range(1, count + 1):
            t = Fraction(2 * k, count + 1) - 1
            if t == 0:
                points.append(Fraction(0))
            else:
                points.append(t / (1 - t * t))
    return points


class AnalyticSymbol:
    """A non-constant real analytic map on an open interval.

    Symbols are self-maps by default (the composition operator needs
    phi(J) inside J); coordinate changes are built with
    ``require_self_map=False`` since they map one interval onto another.
    """

    __slots__ = ("body", "domain", "invariance_certified", "text")

    def __init__(self, body, domain: Interval, *, text=None,
                 require_self_map=True, require_nonconstant=True,
                 _trusted=False):
        self.body = body
        self.domain = domain
        self.text = text
        if _trusted:
            self.invariance_certified = False
            return
        if require_nonconstant:
            self._check_nonconstant()
        self.invariance_certified = self._check_self_map() if require_self_map else False

    # -- construction ------------------------------------------------------

    @classmethod
    def from_coefficients(cls, coeffs, domain=None, *,
                          require_self_map=True) -> "AnalyticSymbol":
        body = PolynomialBody(tuple(
            Fraction(c) if isinstance(c, int) else c for c in _normalize_generic(coeffs)))
        return cls(body, domain or Interval.real_line(),
                   require_self_map=require_self_map)

    def _check_nonconstant(self):
        if isinstance(self.body, PolynomialBody):
            if self.body.degree == 0:
                raise ConstantSymbolError("polynomial symbol is constant")
            return
        if isinstance(self.body, ElementaryBody):
            if not tree_has_variable(self.body.tree):
                raise ConstantSymbolError("expression contains no variable")
            # Numeric backstop against disguised constants.
            with mpmath.workprec(200):
                samples = [eval_tree(self.body.tree, to_mpf(Fraction(k, 7)))
                           for k in (-9, -3, 1, 2, 5, 8, 13)]
                spread = max(samples) - min(samples)
                if spread < mpmath.mpf(2) ** (-180):
                    raise ConstantSymbolError("expression is numerically constant")

    def _check_self_map(self) -> bool:
        if isinstance(self.body, PolynomialBody) and self.body.is_rational():
            rational = [Fraction(c) for c in self.body.coeffs]
            ok, witness = sturm.poly_maps_into(rational, self.domain, [self.domain])
            if not ok:
                raise DomainError(
                    f"not a self-map: image leaves the interval near x={witness}")
            return True
        if isinstance(self.body, ConjugatedBody):
            return False
        # Sampled verification for elementary (and irrational-coefficient)
        # bodies; never certified.
        grid = _sample_grid(self.domain, 1024)
        lo, hi = self.domain.lower, self.domain.upper
        with mpmath.workprec(64):
            slack = mpmath.mpf(2) ** -32
            for x in grid:
                y = to_mpf(self.eval(x, precision=64))
                if is_finite(lo) and y < to_mpf(Fraction(lo)) - slack:
                    raise DomainError(f"not a self-map: value below interval at x={x}")
                if is_finite(hi) and y > to_mpf(Fraction(hi)) + slack:
                    raise DomainError(f"not a self-map: value above interval at x={x}")
        for end in (lo, hi):
            lim = self.limit_at(end)
            if lim.kind == "pos_inf" and is_finite(hi):
                raise DomainError("not a self-map: diverges inside a bounded interval")
            if lim.kind == "neg_inf" and is_finite(lo):
                raise DomainError("not a self-map: diverges inside a bounded interval")
        return False

    # -- basic structure ----------------------------------------------------

    def is_polynomial(self) -> bool:
        return isinstance(self.body, PolynomialBody)

    def is_rational_polynomial(self) -> bool:
        return isinstance(self.body, PolynomialBody) and self.body.is_rational()

    def poly_coeffs(self) -> list[Fraction]:
        if not self.is_polynomial():
            raise TypeError("not a polynomial symbol")
        return list(self.body.coeffs)

    def rational_coeffs(self) -> list[Fraction]:
        if not self.is_rational_polynomial():
            raise TypeError("not a rational polynomial symbol")
        return [Fraction(c) for c in self.body.coeffs]

    def is_identity(self) -> bool:
        return self.is_polynomial() and tuple(self.body.coeffs) == (Fraction(0), Fraction(1))

    def pure_power_exponent(self):
        """s when the symbol is x**s with s >= 2 on the whole line, else None."""
        if not self.is_rational_polynomial() or self.domain != Interval.real_line():
            return None
        coeffs = self.rational_coeffs()
        if len(coeffs) < 3 or coeffs[-1] != 1:
            return None
        if any(c != 0 for c in coeffs[:-1]):
            return None
        return len(coeffs) - 1

    def affine_power_exponent(self):
        """s when the symbol is affinely conjugate to x**s with s >= 2 on the
        whole line, else None.

        Such maps are exactly lead*(x - c)**s + c where the critical point c
        is fixed; odd exponents additionally need a positive leading
        coefficient (the conjugating slope is a real (s-1)-th root).
        """
        if not self.is_rational_polynomial() or self.domain != Interval.real_line():
            return None
        coeffs = self.rational_coeffs()
        s = len(coeffs) - 1
        if s < 2:
            return None
        lead = coeffs[-1]
        if s % 2 == 1 and lead <= 0:
            return None
        center = -coeffs[-2] / (s * lead)
        shifted = polylib.compose(coeffs, [center, Fraction(1)])
        expected = [Fraction(0)] * (s + 1)
        expected[0], expected[s] = center, lead
        return s if shifted == polylib.normalize(expected) else None

    def derivative_polynomial(self) -> list[Fraction]:
        return polylib.derivative(self.rational_coeffs())

    def second_iterate_polynomial(self) -> list[Fraction]:
        p = self.rational_coeffs()
        return polylib.compose(p, p)

    # -- evaluation ---------------------------------------------------------

    def eval(self, x, precision=None):
        """phi(x): exact for rational polynomials at exact points, else mpf
        with error below 2**-(precision-8)."""
        precision = precision or default_precision()
        if not self._point_in_domain(x, precision):
            raise DomainError(f"{x} is outside the domain {self.domain}")
        if isinstance(self.body, PolynomialBody):
            if isinstance(x, (int, Fraction, QuadraticNumber)):
                return polylib.eval_at(list(self.body.coeffs),
                                       Fraction(x) if isinstance(x, int) else x)
            with mpmath.workprec(precision + _GUARD_BITS):
                acc = None
                for c in reversed(self.body.coeffs):
                    acc = to_mpf(c) if acc is None else acc * x + c
                result = acc
            with mpmath.workprec(precision):
                return +result
        if isinstance(self.body, ConjugatedBody):
            change, inner = self.body.change, self.body.inner
            with mpmath.workprec(precision + 2 * _GUARD_BITS):
                mid = inner.eval(change.apply(x, precision + 2 * _GUARD_BITS),
                                 precision + 2 * _GUARD_BITS)
                result = change.apply_inverse(mid, precision + 2 * _GUARD_BITS)
            with mpmath.workprec(precision):
                return +result
        with mpmath.workprec(precision + _GUARD_BITS):
            result = eval_tree(self.body.tree, to_mpf(x))
        with mpmath.workprec(precision):
            return +result

    def _point_in_domain(self, x, precision) -> bool:
        if isinstance(x, (int, Fraction, QuadraticNumber)):
            return self.domain.contains(Fraction(x) if isinstance(x, int) else x)
        lo, hi = self.domain.lower, self.domain.upper
        with mpmath.workprec(precision):
            if is_finite(lo) and not x > to_mpf(Fraction(lo)):
                return False
            if is_finite(hi) and not x < to_mpf(Fraction(hi)):
                return False
        return True

    def derivative_at(self, x, precision=None):
        """phi'(x) via the order-1 jet; exact where the jet is exact."""
        return self.jet(x, 1, precision=precision).coeffs[1]

    # -- jets ----------------------------------------------------------------

    def jet(self, center, order, precision=None) -> TruncatedSeries:
        """Taylor coefficients through the requested order; exact whenever
        every transcendental node is expanded at zero."""
        precision = precision or default_precision()
        if order < 0:
            raise ValueError("order must be >= 0")
        if not self._point_in_domain(center, precision):
            raise DomainError(f"jet center {center} outside {self.domain}")
        if isinstance(self.body, PolynomialBody):
            return _series_from_poly(self.body.coeffs,
                                     Fraction(center) if isinstance(center, int) else center,
                                     order)
        if isinstance(self.body, ConjugatedBody):
            return self._conjugated_jet(center, order, precision)
        tree = self.body.tree
        if isinstance(center, (int, Fraction)):
            try:
                return tree_jet(tree, Fraction(center), order, exact=True)
            except _NeedNumeric:
                pass
        with mpmath.workprec(precision + _GUARD_BITS):
            series = tree_jet(tree, to_mpf(center), order, exact=False)
        return series

    def _conjugated_jet(self, center, order, precision):
        change, inner = self.body.change, self.body.inner
        with mpmath.workprec(precision + 2 * _GUARD_BITS):
            w = to_mpf(center)
            fwd = change.forward.jet(w, order, precision)
            inner_jet = inner.jet(fwd.coeffs[0], order, precision)
            comp = inner_jet.compose(fwd)
            u3 = change.apply_inverse(comp.coeffs[0], precision)
            back = change.forward.jet(u3, order, precision).reversion()
            back = TruncatedSeries(comp.coeffs[0], back.coeffs)
            return back.compose(comp)

    # -- iteration -----------------------------------------------------------

    def iterate(self, n: int, x, precision=None):
        """n-fold composition applied to x, checking the orbit stays inside
        the domain step by step."""
        precision = precision or default_precision()
        if n < 0:
            raise ValueError("iteration count must be >= 0")
        current = x
        if not self._point_in_domain(current, precision):
            raise OrbitEscape(0, current)
        for k in range(n):
            current = self.eval(current, precision=precision)
            if k + 1 < n and not self._point_in_domain(current, precision):
                raise OrbitEscape(k + 1, current)
        return current

    # -- limits ---------------------------------------------------------------

    def limit_at(self, end) -> Limit:
        """Limit of the symbol toward an end of its domain."""
        if isinstance(self.body, PolynomialBody):
            return _poly_limit(self.body.coeffs, end)
        if isinstance(self.body, ConjugatedBody):
            return _UNKNOWN
        if isinstance(end, Fraction):
            with mpmath.workprec(96):
                return Limit("finite", approx=eval_tree(self.body.tree, to_mpf(end)))
        return tree_limit(self.body.tree, end)

    # -- display ---------------------------------------------------------------

    def __str__(self):
        if self.text:
            return self.text
        if isinstance(self.body, PolynomialBody):
            return format_polynomial(self.body.coeffs)
        if isinstance(self.body, ConjugatedBody):
            return f"conjugate({self.body.inner}, {self.body.change})"
        return format_tree(self.body.tree)

    def __repr__(self):
        return f"AnalyticSymbol({self}, domain={self.domain})"

    def __eq__(self, other):
        if not isinstance(other, AnalyticSymbol):
            return NotImplemented
        return self.body == other.body and self.domain == other.domain

    def __hash__(self):
        return hash((self.body, self.domain))

    def with_domain(self, domain: Interval) -> "AnalyticSymbol":
        """The same map restricted to a smaller invariant interval."""
        return AnalyticSymbol(self.body, domain, text=self.text)


def _normalize_generic(coeffs):
    out = list(coeffs)
    while len(out) > 1 and _is_zero_scalar(out[-1]):
        out.pop()
    return out or [Fraction(0)]


def _is_zero_scalar(c):
    if isinstance(c, QuadraticNumber):
        return c.sign() == 0
    return c == 0


def format_polynomial(coeffs) -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if _is_zero_scalar(c):
            continue
        if isinstance(c, QuadraticNumber):
            mag, sign = str(c), "+"
            body = f"({mag})"
        else:
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = format_rational(mag)
        if k == 0:
            term = body
        else:
            xpow = "x" if k == 1 else f"x^{k}"
            term = xpow if (not isinstance(c, QuadraticNumber) and mag == 1) \
                else f"{body}*{xpow}"
        terms.append((sign, term))
    if not terms:
        return "0"
    first_sign, first_term = terms[0]
    parts = [f"-{first_term}" if first_sign == "-" else first_term]
    for sign, term in terms[1:]:
        parts.append(f" {sign} {term}")
    return "".join(parts)


def format_tree(node) -> str:
    if isinstance(node, Poly):
        return format_polynomial(node.coeffs)
    if isinstance(node, Add):
        return " + ".join(_paren_if(p, Add) for p in node.parts).replace("+ -", "- ")
    if isinstance(node, Mul):
        return "*".join(_paren_if(p, (Add, Mul)) for p in node.parts)
    if isinstance(node, Pow):
        return f"{_paren_if(node.base, (Add, Mul, Pow))}^{node.exponent}"
    return f"{node.fn}({format_tree(node.arg)})"


def _paren_if(node, kinds) -> str:
    text = format_tree(node)
    if isinstance(node, kinds) or (isinstance(node, Poly) and len(node.coeffs) > 1):
        return f"({text})"
    return text


def parse_symbol(text: str, domain=None, *, require_self_map=True) -> AnalyticSymbol:
    """Parse expression text into a symbol over the given open interval.

    The body is stored as an exact polynomial whenever the folded tree is
    polynomial; a constant map raises ConstantSymbolError.
    """
    domain = domain or Interval.real_line()
    if isinstance(domain, str):
        domain = Interval.parse(domain)
    tree = fold(_Parser(text).parse())
    if isinstance(tree, Poly):
        if len(tree.coeffs) == 1:
            raise ConstantSymbolError(f"{text!r} denotes a constant map")
        body = PolynomialBody(tree.coeffs)
    else:
        body = ElementaryBody(tree)
    return AnalyticSymbol(body, domain, text=text.strip(),
                          require_self_map=require_self_map)


def parse_change(text: str, domain=None) -> "Diffeomorphism":
    """Parse a coordinate change (no self-map requirement)."""
    return Diffeomorphism(parse_symbol(text, domain, require_self_map=False))


def parse_rhs(text: str, domain=None) -> AnalyticSymbol:
    """Parse a right-hand side function: constants allowed, no self-map
    requirement."""
    domain = domain or Interval.real_line()
    if isinstance(domain, str):
        domain = Interval.parse(domain)
    tree = fold(_Parser(text).parse())
    if isinstance(tree, Poly):
        body = PolynomialBody(tree.coeffs)
    else:
        body = ElementaryBody(tree)
    return AnalyticSymbol(body, domain, text=text.strip(),
                          require_self_map=False, require_nonconstant=False)


def identity_symbol(domain=None) -> AnalyticSymbol:
    return AnalyticSymbol.from_coefficients([0, 1], domain)


# ---------------------------------------------------------------------------
# Diffeomorphisms and conjugation


class Diffeomorphism:
    """An invertible analytic coordinate change with a usable inverse.

    The inverse is exact (affine forward maps), a caller-supplied closed
    form, or a bracketed numeric root solve against the forward map.
    """

    __slots__ = ("forward", "inverse_fn", "increasing", "certified", "_affine")

    def __init__(self, forward: AnalyticSymbol, inverse_fn=None):
        self.forward = forward
        self.inverse_fn = inverse_fn
        self._affine = None
        if forward.is_polynomial() and forward.body.degree == 1:
            offset, scale = forward.body.coeffs
            self._affine = (scale, offset)  # y = scale*x + offset
            self.increasing = _scalar_positive(scale)
            if _is_zero_scalar(scale):
                raise NotADiffeomorphism("affine map with zero slope")
            self.certified = True
            return
        self.increasing, self.certified = self._monotone_direction()

    def _monotone_direction(self):
        phi = self.forward
        if phi.is_rational_polynomial():
            dp = phi.derivative_polynomial()
            if sturm.count_roots_open(dp, phi.domain) > 0:
                raise NotADiffeomorphism("derivative changes sign on the domain")
            mid = phi.domain.midpoint()
            return polylib.eval_at(dp, mid) > 0, True
        sign = None
        for x in _sample_grid(phi.domain, 128):
            d = phi.derivative_at(x, precision=64)
            s = 1 if d > 0 else (-1 if d < 0 else 0)
            if s == 0:
                continue
            if sign is None:
                sign = s
            elif sign != s:
                raise NotADiffeomorphism("derivative changes sign (sampled)")
        if sign is None:
            raise NotADiffeomorphism("derivative vanishes on the sample grid")
        return sign > 0, False

    def image_interval(self):
        """The image of the forward map as limits at the domain ends."""
        lo = self.forward.limit_at(self.forward.domain.lower)
        hi = self.forward.limit_at(self.forward.domain.upper)
        return (lo, hi) if self.increasing else (hi, lo)

    def apply(self, x, precision=None):
        precision = precision or default_precision()
        if self._affine is not None and isinstance(x, (int, Fraction, QuadraticNumber)):
            scale, offset = self._affine
            return scale * x + offset
        return self.forward.eval(x, precision=precision)

    def apply_inverse(self, y, precision=None):
        precision = precision or default_precision()
        if self._affine is not None:
            scale, offset = self._affine
            if isinstance(y, (int, Fraction, QuadraticNumber)):
                return (y - offset) * _invert_scalar(scale)
            with mpmath.workprec(precision + _GUARD_BITS):
                return (y - to_mpf(offset)) / to_mpf(scale)
        if self.inverse_fn is not None:
            with mpmath.workprec(precision + _GUARD_BITS):
                return self.inverse_fn(to_mpf(y))
        return self._numeric_inverse(y, precision)

    def _numeric_inverse(self, y, precision):
        phi = self.forward
        lo_dom, hi_dom = phi.domain.lower, phi.domain.upper
        with mpmath.workprec(precision + 2 * _GUARD_BITS):
            target = to_mpf(y)

            def shifted(x):
                return phi.eval(x, precision=precision + 2 * _GUARD_BITS) - target

            a, b = self._bracket(shifted, lo_dom, hi_dom)
            fa = shifted(a)
            for _ in range(precision + 2 * _GUARD_BITS + 8):
                mid = (a + b) / 2
                fm = shifted(mid)
                if fm == 0:
                    return mid
                if (fm < 0) == (fa < 0):
                    a, fa = mid, fm
                else:
                    b = mid
                if b - a < mpmath.mpf(2) ** (-(precision + _GUARD_BITS)) * (1 + abs(mid)):
                    break
            return (a + b) / 2

    def _bracket(self, shifted, lo_dom, hi_dom):
        seed = mpmath.mpf(0)
        if is_finite(lo_dom) and is_finite(hi_dom):
            lo, hi = to_mpf(Fraction(lo_dom)), to_mpf(Fraction(hi_dom))
            return lo + (hi - lo) / 1000, hi - (hi - lo) / 1000
        step = mpmath.mpf(1)
        increasing = self.increasing
        a = b = seed
        fa = shifted(a)
        for _ in range(200):
            if fa == 0:
                return a - mpmath.mpf("1e-30"), a + mpmath.mpf("1e-30")
            go_up = (fa < 0) == increasing
            if go_up:
                b = a + step
                while is_finite(hi_dom) and not b < to_mpf(Fraction(hi_dom)):
                    b = (a + to_mpf(Fraction(hi_dom))) / 2
                fb = shifted(b)
                if (fb < 0) != (fa < 0) or fb == 0:
                    return a, b
                a, fa = b, fb
            else:
                b = a - step
                while is_finite(lo_dom) and not b > to_mpf(Fraction(lo_dom)):
                    b = (a + to_mpf(Fraction(lo_dom))) / 2
                fb = shifted(b)
                if (fb < 0) != (fa < 0) or fb == 0:
                    return b, a
                a, fa = b, fb
            step *= 2
        raise NotADiffeomorphism("could not bracket the inverse image")

    def roundtrip_error(self, x, precision=None):
        precision = precision or default_precision()
        with mpmath.workprec(precision + _GUARD_BITS):
            y = self.apply(x, precision)
            back = self.apply_inverse(y, precision)
            if isinstance(back, (int, Fraction, QuadraticNumber)) and \
                    isinstance(x, (int, Fraction, QuadraticNumber)):
                return back - x
            return abs(to_mpf(back) - to_mpf(x))

    def __str__(self):
        return f"{self.forward}"

    def __repr__(self):
        return f"Diffeomorphism({self.forward!r})"


def _scalar_positive(c) -> bool:
    if isinstance(c, QuadraticNumber):
        return c.sign() > 0
    return c > 0


def _invert_scalar(c):
    if isinstance(c, (int, Fraction)):
        return Fraction(1) / Fraction(c)
    return 1 / c


def identity_diffeomorphism(domain=None) -> Diffeomorphism:
    return Diffeomorphism(identity_symbol(domain))


def _poly_compose_generic(outer, inner):
    """Composition of coefficient lists that may mix Fractions and
    QuadraticNumbers."""
    acc = [Fraction(0)]
    for c in reversed(outer):
        acc = _generic_mul(acc, inner)
        acc = _generic_add(acc, [c])
    return _normalize_generic(acc)


def _generic_add(a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else Fraction(0)
        y = b[i] if i < len(b) else Fraction(0)
        out.append(x + y)
    return out


def _generic_mul(a, b):
    if len(a) == 1 and _is_zero_scalar(a[0]):
        return [Fraction(0)]
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def conjugate(phi: AnalyticSymbol, delta: Diffeomorphism) -> AnalyticSymbol:
    """The conjugated symbol delta^(-1) o phi o delta on delta's domain.

    Exact (and in-grammar) for affine changes; other changes produce a
    numerically evaluated composite flagged as uncertified.
    """
    _require_image_matches(delta, phi.domain)
    new_domain = delta.forward.domain
    if delta._affine is not None:
        scale, offset = delta._affine
        inv_scale = _invert_scalar(scale)
        if phi.is_polynomial():
            inner = _poly_compose_generic(list(phi.body.coeffs), [offset, scale])
            shifted = _generic_add(inner, [-offset])
            coeffs = [c * inv_scale for c in shifted]
            return AnalyticSymbol(PolynomialBody(tuple(_normalize_generic(coeffs))),
                                  new_domain)
        if isinstance(phi.body, ElementaryBody) and isinstance(scale, Fraction) \
                and isinstance(offset, Fraction):
            sub = substitute_affine(phi.body.tree, scale, offset)
            folded = fold(Mul((Poly((inv_scale,)),
                               Add((sub, Poly((-offset,)))))))
            if isinstance(folded, Poly):
                return AnalyticSymbol(PolynomialBody(folded.coeffs), new_domain)
            return AnalyticSymbol(ElementaryBody(folded), new_domain)
    return AnalyticSymbol(ConjugatedBody(phi, delta), new_domain, _trusted=True)


def _require_image_matches(delta: Diffeomorphism, target: Interval):
    lo_lim, hi_lim = delta.image_interval()
    for lim, end in ((lo_lim, target.lower), (hi_lim, target.upper)):
        if lim.kind == "unknown":
            continue
        if not is_finite(end):
            wanted = "pos_inf" if end is POS_INF else "neg_inf"
            if lim.kind not in (wanted, "unknown"):
                raise DomainError("coordinate change is not onto the symbol domain")
        else:
            if lim.kind in ("pos_inf", "neg_inf"):
                raise DomainError("coordinate change overshoots the symbol domain")
            if lim.exact and lim.value != Fraction(end):
                raise DomainError("coordinate change is not onto the symbol domain")


# ---------------------------------------------------------------------------
# Quadratic normal form


class NoFixedPoints:
    """Sentinel: the quadratic has no real fixed point."""

    def __repr__(self):
        return "NoFixedPoints()"

    def __eq__(self, other):
        return isinstance(other, NoFixedPoints)

    def __hash__(self):
        return hash("NoFixedPoints")


@dataclass(frozen=True)
class QuadraticNormalForm:
    """Data of the reduction to -x**2 + mu*x: the parameter, the affine
    change achieving it, and the original fixed points (u, v)."""

    mu: object                # Fraction or QuadraticNumber, >= 1
    delta: Diffeomorphism
    fixed_u: object
    fixed_v: object


def normalize_quadratic(a, b, c):
    """Reduce a*x^2 + b*x + c to its normal form -x^2 + mu*x, mu >= 1.

    Returns NoFixedPoints when the fixed point equation has no real root;
    otherwise chooses the fixed point ordering that makes
    mu = 1 + a*(u - v) at least one, and the affine change
    delta(x) = -x/a + u realizing the conjugation exactly.
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if a == 0:
        raise ValueError("leading coefficient must be nonzero")
    roots = sturm.solve_quadratic_exact([c, b - 1, a])
    if not roots:
        return NoFixedPoints()
    if len(roots) == 1:
        u = v = roots[0]
    else:
        low, high = roots
        if a < 0:
            u, v = low, high
        else:
            u, v = high, low
    mu = 1 + a * (u - v)
    delta_sym = AnalyticSymbol(PolynomialBody((u, Fraction(-1) / a)),
                               Interval.real_line(), require_self_map=False)
    delta = Diffeomorphism(delta_sym)
    return QuadraticNormalForm(mu=mu, delta=delta, fixed_u=u, fixed_v=v)
