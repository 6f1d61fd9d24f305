"""Formal power-series solutions of f(phi(x)) - lambda*f(x) = gamma(x) at a
fixed point, the explicit coefficient recurrence for the parabolic
quadratic, Koenigs linearization, and eigenfunction series.

The triangular solve is exact whenever the jets and the eigenvalue are
exact; the resonance condition lambda = multiplier**n aborts with a typed
error because the solution is then not unique.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .config import default_precision
from .errors import (HypothesisViolation, NeutralOrSuperattracting,
                     ResonantEigenvalue, ZeroLambda)
from .numbers import GaussianRational, QuadraticNumber, to_mpf
from .power_series import (Converges, Diverges, Inconclusive, TruncatedSeries,
                           estimate_radius)
from .symbols import AnalyticSymbol


def _is_exact_scalar(v) -> bool:
    return isinstance(v, (int, Fraction, GaussianRational, QuadraticNumber))


@dataclass(frozen=True)
class LocalSolution:
    """Truncated formal solution at a fixed point, with its ingredients."""

    series: TruncatedSeries
    lam: object
    gamma: AnalyticSymbol
    phi: AnalyticSymbol
    multiplier: object
    resonances: list = field(default_factory=list)
    radius_verdict: object = None
    phi_jet: TruncatedSeries = None
    gamma_jet: TruncatedSeries = None

    @property
    def center(self):
        return self.series.center

    def residual_series(self) -> TruncatedSeries:
        """f(phi(x)) - lambda*f(x) - gamma(x) through the stored order."""
        composed = self.series.compose(self.phi_jet)
        return composed - self.series * self.lam - self.gamma_jet

    def to_json_dict(self):
        verdict = self.radius_verdict
        doc = {
            "series": self.series.to_json_dict(),
            "lambda": str(self.lam),
            "multiplier": str(self.multiplier),
            "resonances": list(self.resonances),
            "radius": radius_verdict_json(verdict),
        }
        return doc


def radius_verdict_json(verdict):
    if verdict is None:
        return None
    if isinstance(verdict, Converges):
        est = verdict.radius_estimate
        return {"verdict": "converges",
                "radius_estimate": None if est is None else mpmath.nstr(est, 12)}
    if isinstance(verdict, Diverges):
        return {"verdict": "diverges", "certificate": verdict.certificate}
    return {"verdict": "inconclusive", "reason": verdict.reason}


def _check_fixed_point(phi: AnalyticSymbol, u, precision):
    if isinstance(u, (int, Fraction, QuadraticNumber)):
        value = phi.eval(u, precision=precision)
        if _is_exact_scalar(value):
            if not value == u:
                raise HypothesisViolation(f"{u} is not a fixed point")
            return
        if abs(to_mpf(value) - to_mpf(u)) > mpmath.mpf(2) ** (-precision // 2):
            raise HypothesisViolation(f"{u} is not a fixed point")
        return
    with mpmath.workprec(precision):
        value = phi.eval(u, precision=precision)
        if abs(to_mpf(value) - to_mpf(u)) > mpmath.mpf(2) ** (-precision // 2):
            raise HypothesisViolation(f"{u} is not a fixed point")


def _composition_matrix(phi_jet: TruncatedSeries, order: int):
    """Rows of [t**n] (phi(u+t) - u)**j for j = 0..order."""
    shifted = TruncatedSeries(0, (Fraction(0),) + phi_jet.coeffs[1:order + 1])
    one = TruncatedSeries(0, [Fraction(1)] + [Fraction(0)] * order)
    powers = [one]
    for _ in range(order):
        powers.append(powers[-1] * shifted)
    return powers


def _powers_equal(m_pow, lam) -> bool:
    if _is_exact_scalar(m_pow) and _is_exact_scalar(lam):
        return m_pow == lam
    return abs(to_mpf(m_pow) - _lam_mpf(lam)) < mpmath.mpf(2) ** -48


def _lam_mpf(lam):
    if isinstance(lam, GaussianRational):
        if lam.im != 0:
            return mpmath.mpc(to_mpf(lam.re), to_mpf(lam.im))
        return to_mpf(lam.re)
    return to_mpf(lam)


def solve_formal(phi: AnalyticSymbol, u, lam, gamma: AnalyticSymbol,
                 order: int, precision=None, estimate=True) -> LocalSolution:
    """The unique truncated solution of f(phi(x)) - lam*f(x) = gamma(x).

    Solved triangularly: (m**n - lam) f_n = gamma_n - (lower-order terms of
    the composition), so the constant term is gamma(u)/(1 - lam).  Exact
    residual zero through the requested order for exact inputs.
    """
    precision = precision or default_precision()
    if _is_zero_lambda(lam):
        raise ZeroLambda("eigenvalue parameter must be nonzero")
    _check_fixed_point(phi, u, precision)
    phi_jet = phi.jet(u, order, precision=precision)
    gamma_jet = gamma.jet(u, order, precision=precision)
    m = phi_jet.coeffs[1] if order >= 1 else phi.derivative_at(u, precision)
    if isinstance(lam, GaussianRational) and not (
            phi_jet.is_exact() and gamma_jet.is_exact()):
        lam = _lam_mpf(lam)

    powers = _composition_matrix(phi_jet, order)
    coeffs = []
    m_pow = _one_like(m)
    for n in range(order + 1):
        if _powers_equal(m_pow, lam):
            raise ResonantEigenvalue(n)
        rhs = gamma_jet.coeffs[n]
        for j in range(n):
            a = powers[j].coeffs[n]
            if _is_zero(a):
                continue
            rhs = rhs - coeffs[j] * a
        coeffs.append(rhs / (m_pow - lam))
        m_pow = m_pow * m
    series = TruncatedSeries(u, coeffs)
    verdict = None
    if estimate and order >= 16:
        verdict = estimate_radius(series)
    elif estimate:
        verdict = Inconclusive("order below 16")
    return LocalSolution(series=series, lam=lam, gamma=gamma, phi=phi,
                         multiplier=m, resonances=[], radius_verdict=verdict,
                         phi_jet=phi_jet, gamma_jet=gamma_jet)


def _one_like(m):
    if isinstance(m, (int, Fraction, GaussianRational, QuadraticNumber)):
        return Fraction(1)
    return mpmath.mpf(1)


def _is_zero(v) -> bool:
    return v == 0


def _is_zero_lambda(lam) -> bool:
    if isinstance(lam, GaussianRational):
        return lam.re == 0 and lam.im == 0
    return lam == 0


def smajdor_condition(lam, m, order: int) -> list[bool]:
    """Entry n: the uniqueness condition 1 - (1/lam) m**n != 0 holds, i.e.
    lam != m**n.  All-true through the order guarantees the triangular
    solve succeeds."""
    if _is_zero_lambda(lam):
        raise ZeroLambda("eigenvalue parameter must be nonzero")
    out = []
    m_pow = _one_like(m)
    for _ in range(order + 1):
        out.append(not _powers_equal(m_pow, lam))
        m_pow = m_pow * m
    return out


def quadratic_id_recurrence(lam, order: int) -> list:
    """Coefficients of the formal solution for the parabolic quadratic map
    x - x**2 with right-hand side x, by the explicit binomial recurrence:

        f_0 = 0,  f_1 = 1/(1 - lam),
        f_n = 1/(1 - lam) * sum_{j=1..n//2} C(n-j, j) (-1)**(j-1) f_{n-j}.

    An independent code path from solve_formal, used as its cross-oracle.
    """
    lam = _coerce_exact(lam)
    if lam == 1:
        raise ResonantEigenvalue(0)
    inv = _invert(1 - lam)
    coeffs = [Fraction(0)]
    if order >= 1:
        coeffs.append(inv)
    for n in range(2, order + 1):
        acc = 0
        for j in range(1, n // 2 + 1):
            term = math.comb(n - j, j) * coeffs[n - j]
            acc = acc + (term if j % 2 == 1 else -term)
        coeffs.append(inv * acc)
    return coeffs


def _coerce_exact(lam):
    if isinstance(lam, int):
        return Fraction(lam)
    return lam


def _invert(v):
    if isinstance(v, (int, Fraction)):
        return Fraction(1) / Fraction(v)
    return 1 / v


def koenigs(phi: AnalyticSymbol, u, order: int, precision=None) -> TruncatedSeries:
    """The linearizing series: sigma(u) = 0, sigma'(u) = 1, and
    sigma(phi(x)) = m*sigma(x) exactly through the order.

    Requires an attracting, non-superattracting multiplier.
    """
    precision = precision or default_precision()
    _check_fixed_point(phi, u, precision)
    phi_jet = phi.jet(u, order, precision=precision)
    if order < 1:
        raise ValueError("order must be at least 1")
    m = phi_jet.coeffs[1]
    _require_strictly_attracting(m)
    powers = _composition_matrix(phi_jet, order)
    coeffs = [_zero_like(m), _one_series_like(m)]
    m_pow = m
    for n in range(2, order + 1):
        m_pow = m_pow * m  # m**n
        rhs = 0
        for j in range(1, n):
            a = powers[j].coeffs[n]
            if _is_zero(a):
                continue
            rhs = rhs + coeffs[j] * a
        coeffs.append(-rhs / (m_pow - m))
    return TruncatedSeries(u, coeffs)


def _require_strictly_attracting(m):
    if isinstance(m, (int, Fraction)):
        if m == 0 or abs(Fraction(m)) >= 1:
            raise NeutralOrSuperattracting(f"multiplier {m} not in 0 < |m| < 1")
        return
    if isinstance(m, QuadraticNumber):
        if abs(m) >= 1:
            raise NeutralOrSuperattracting("multiplier modulus is at least one")
        return
    mag = abs(to_mpf(m))
    tol = mpmath.mpf(2) ** -40
    if mag < tol or abs(mag - 1) < tol:
        raise NeutralOrSuperattracting("multiplier too close to zero or one")
    if mag > 1:
        raise NeutralOrSuperattracting("multiplier modulus exceeds one")


def _zero_like(m):
    return Fraction(0) if _is_exact_scalar(m) else mpmath.mpf(0)


def _one_series_like(m):
    return Fraction(1) if _is_exact_scalar(m) else mpmath.mpf(1)


def eigenfunction(phi: AnalyticSymbol, u, n: int, order: int,
                  precision=None) -> TruncatedSeries:
    """The n-th power of the linearizer: an eigenvector candidate for the
    eigenvalue m**n, with zero composition residual through the order."""
    if n < 0:
        raise ValueError("power must be nonnegative")
    if n == 0:
        return TruncatedSeries(u, [Fraction(1)] + [Fraction(0)] * order)
    sigma = koenigs(phi, u, order, precision=precision)
    return sigma.power(n)


def schroeder_residual(phi: AnalyticSymbol, sigma: TruncatedSeries,
                       eigenvalue, precision=None) -> TruncatedSeries:
    """sigma(phi(x)) - eigenvalue*sigma(x) through sigma's order."""
    precision = precision or default_precision()
    phi_jet = phi.jet(sigma.center, sigma.order, precision=precision)
    return sigma.compose(phi_jet) - sigma * eigenvalue
