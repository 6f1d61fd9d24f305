import math
import random
from fractions import Fraction as F

import pytest

from compspec.errors import (NeutralOrSuperattracting, ResonantEigenvalue,
                             ZeroLambda)
from compspec.numbers import GaussianRational
from compspec.power_series import Diverges
from compspec.solver import (eigenfunction, koenigs, quadratic_id_recurrence,
                             schroeder_residual, smajdor_condition,
                             solve_formal)
from compspec.symbols import conjugate, parse_change, parse_rhs, parse_symbol


class TestSolveFormal:
    def test_linear_symbol_quadratic_rhs(self):
        sol = solve_formal(parse_symbol("1/2*x"), F(0), F(5),
                           parse_rhs("1+x^2"), 2)
        assert sol.series.coeffs == (F(-1, 4), F(0), F(-4, 19))
        assert all(c == 0 for c in sol.residual_series().coeffs)

    def test_resonance_detected(self):
        with pytest.raises(ResonantEigenvalue) as err:
            solve_formal(parse_symbol("1/2*x"), F(0), F(1, 4),
                         parse_rhs("x^2"), 2)
        assert err.value.order == 2

    def test_parabolic_identity_rhs(self):
        sol = solve_formal(parse_symbol("-x^2+x"), F(0), F(2), parse_rhs("x"), 3)
        assert sol.series.coeffs == (F(0), F(-1), F(1), F(-2))

    def test_zero_lambda_rejected(self):
        with pytest.raises(ZeroLambda):
            solve_formal(parse_symbol("1/2*x"), F(0), F(0), parse_rhs("x"), 2)

    def test_constant_term_formula(self):
        # f(u) = gamma(u) / (1 - lam) at every non-resonant lam
        sol = solve_formal(parse_symbol("-x^2+3*x"), F(2), F(7),
                           parse_rhs("x^2+1"), 4)
        assert sol.series.coeffs[0] == F(5) / (1 - 7)

    def test_gaussian_lambda_exact(self):
        lam = GaussianRational(0, 1)  # i
        sol = solve_formal(parse_symbol("1/2*x"), F(0), lam, parse_rhs("1+x"), 3)
        residual = sol.residual_series()
        assert all(c == 0 for c in residual.coeffs)
        # f(0) = gamma(0)/(1 - i) = (1 + i)/2
        assert sol.series.coeffs[0] == GaussianRational(F(1, 2), F(1, 2))

    def test_randomized_exact_residual_suite(self):
        # Polynomial symbols with a rational attracting fixed point at 0,
        # polynomial right-hand sides, rational lambda off the resonance
        # set: the residual vanishes identically through order 16.
        rng = random.Random(99)
        done = 0
        while done < 100:
            m = F(rng.randint(1, 9), 10)
            deg = rng.randint(2, 4)
            phi_coeffs = [F(0), m] + [F(rng.randint(-3, 3), rng.randint(1, 4))
                                      for _ in range(deg - 1)]
            phi = parse_symbol(_poly_text(phi_coeffs))
            gamma = parse_rhs(_poly_text(
                [F(rng.randint(-5, 5), rng.randint(1, 3))
                 for _ in range(rng.randint(1, 5))]))
            lam = F(rng.randint(2, 30), rng.randint(1, 7))
            powers = {m ** n for n in range(17)}
            if lam in powers or lam == 0:
                continue
            sol = solve_formal(phi, F(0), lam, gamma, 16, estimate=False)
            assert all(c == 0 for c in sol.residual_series().coeffs)
            done += 1


def _poly_text(coeffs) -> str:
    parts = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        term = f"{c}" if k == 0 else (f"{c}*x" if k == 1 else f"{c}*x^{k}")
        parts.append(term.replace("-", "- ") if False else term)
    text = " + ".join(parts) if parts else "0"
    return text.replace("+ -", "- ")


class TestQuadraticRecurrence:
    def test_frozen_head_lambda_two(self):
        assert quadratic_id_recurrence(F(2), 5) == [
            F(0), F(-1), F(1), F(-2), F(7), F(-34)]

    def test_lambda_minus_one(self):
        assert quadratic_id_recurrence(F(-1), 2) == [F(0), F(1, 2), F(1, 4)]

    def test_rejects_lambda_one(self):
        with pytest.raises(ResonantEigenvalue):
            quadratic_id_recurrence(F(1), 4)

    def test_sign_alternation(self):
        coeffs = quadratic_id_recurrence(F(2), 40)
        assert all((-1) ** n * coeffs[n] > 0 for n in range(1, 41))

    def test_factorial_growth_bound(self):
        coeffs = quadratic_id_recurrence(F(2), 40)
        assert all(abs(coeffs[n]) >= math.factorial(n - 1)
                   for n in range(2, 41))

    def test_oracle_agreement_with_solver(self):
        # Two independent code paths must agree coefficientwise.
        rng = random.Random(5)
        phi = parse_symbol("-x^2+x")
        ident = parse_rhs("x")
        for _ in range(20):
            lam = F(rng.randint(-40, 40), rng.randint(1, 9))
            if lam in (0, 1):
                continue
            direct = quadratic_id_recurrence(lam, 12)
            solved = solve_formal(phi, F(0), lam, ident, 12, estimate=False)
            assert direct == list(solved.series.coeffs)

    def test_divergence_verdict_at_order_forty(self):
        sol = solve_formal(parse_symbol("-x^2+x"), F(0), F(2), parse_rhs("x"), 40)
        assert isinstance(sol.radius_verdict, Diverges)


class TestSmajdor:
    def test_always_true_for_safe_lambda(self):
        assert all(smajdor_condition(F(2), F(1), 6))

    def test_single_failure_at_matching_power(self):
        flags = smajdor_condition(F(1, 8), F(1, 2), 5)
        assert flags == [True, True, True, False, True, True]

    def test_failure_at_order_zero(self):
        flags = smajdor_condition(F(1), F(1, 2), 3)
        assert flags == [False, True, True, True]

    def test_all_true_implies_solver_succeeds(self):
        lam, m = F(3, 5), F(1, 2)
        flags = smajdor_condition(lam, m, 8)
        assert all(flags)
        sol = solve_formal(parse_symbol("1/2*x - x^2"), F(0), lam,
                           parse_rhs("x+1"), 8, estimate=False)
        assert all(c == 0 for c in sol.residual_series().coeffs)


class TestKoenigs:
    def test_linear_is_identity(self):
        sigma = koenigs(parse_symbol("1/2*x"), F(0), 6)
        assert sigma.coeffs == (F(0), F(1), F(0), F(0), F(0), F(0), F(0))

    def test_quadratic_second_coefficient(self):
        sigma = koenigs(parse_symbol("1/2*x - x^2"), F(0), 8)
        assert sigma.coeffs[2] == F(-4)
        res = schroeder_residual(parse_symbol("1/2*x - x^2"), sigma, F(1, 2))
        assert all(c == 0 for c in res.coeffs)

    def test_arctan_exact_through_twenty(self):
        phi = parse_symbol("1/2*arctan(x)")
        sigma = koenigs(phi, F(0), 20)
        assert sigma.is_exact()
        res = schroeder_residual(phi, sigma, F(1, 2))
        assert all(c == 0 for c in res.coeffs)

    def test_rejects_neutral_and_superattracting(self):
        with pytest.raises(NeutralOrSuperattracting):
            koenigs(parse_symbol("-x^2+x"), F(0), 6)       # multiplier 1
        with pytest.raises(NeutralOrSuperattracting):
            koenigs(parse_symbol("x^2"), F(0), 6)          # multiplier 0
        with pytest.raises(NeutralOrSuperattracting):
            koenigs(parse_symbol("-x^2+4*x"), F(0), 6)     # multiplier 4

    def test_radius_verdict_positive(self):
        from compspec.power_series import Converges, estimate_radius
        sigma = koenigs(parse_symbol("1/2*x - x^2"), F(0), 30)
        verdict = estimate_radius(sigma)
        assert isinstance(verdict, Converges)
        assert verdict.radius_estimate > 0

    def test_affine_functoriality(self):
        # koenigs(delta^-1 phi delta) equals koenigs(phi) o delta divided by
        # the affine slope, coefficientwise through order 12.
        phi = parse_symbol("1/2*x - x^2")
        delta = parse_change("2*x + 1")
        psi = conjugate(phi, delta)
        center = F(-1, 2)  # delta(-1/2) = 0
        lhs = koenigs(psi, center, 12)
        delta_jet = delta.forward.jet(center, 12)
        rhs = koenigs(phi, F(0), 12).compose(delta_jet) * F(1, 2)
        assert lhs.coeffs == rhs.coeffs


class TestEigenfunction:
    def test_monomial_eigenfunctions_of_halving(self):
        e3 = eigenfunction(parse_symbol("1/2*x"), F(0), 3, 6)
        assert e3.coeffs == (F(0),) * 3 + (F(1),) + (F(0),) * 3

    def test_power_zero_is_constant(self):
        e0 = eigenfunction(parse_symbol("1/2*arctan(x)"), F(0), 0, 5)
        assert e0.coeffs == (F(1),) + (F(0),) * 5

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_arctan_eigenfunction_residuals(self, n):
        phi = parse_symbol("1/2*arctan(x)")
        e = eigenfunction(phi, F(0), n, 20)
        res = schroeder_residual(phi, e, F(1, 2) ** n)
        assert all(c == 0 for c in res.coeffs)
