import random
from fractions import Fraction as F

import pytest

from compspec import polynomials as polylib
from compspec import sturm
from compspec.errors import HypothesisViolation
from compspec.intervals import Interval
from compspec.rootwork import (AllFixed, analyze_symbol,
                               attraction_basin_check,
                               critical_set_bounded_away, find_critical_points,
                               find_fixed_points,
                               find_fixed_points_second_iterate,
                               is_diffeomorphism)
from compspec.symbols import conjugate, parse_change, parse_symbol


def locations(records):
    return [r.location for r in records]


class TestFixedPoints:
    def test_quadratic_mu_4(self):
        recs = find_fixed_points(parse_symbol("-x^2+4*x"))
        assert locations(recs) == [0, 3]
        assert [r.multiplier for r in recs] == [4, -2]
        assert [r.kind for r in recs] == ["repelling", "repelling"]

    def test_cubic(self):
        recs = find_fixed_points(parse_symbol("1/2*x^3+1/2*x"))
        assert locations(recs) == [-1, 0, 1]
        assert [r.multiplier for r in recs] == [2, F(1, 2), 2]

    def test_arctan_heuristic(self):
        recs = find_fixed_points(parse_symbol("1/2*arctan(x)"))
        assert len(recs) == 1
        assert recs[0].location == 0
        assert recs[0].multiplier == F(1, 2)
        assert recs[0].kind == "attracting"
        assert not recs[0].exact

    def test_no_fixed_points(self):
        assert find_fixed_points(parse_symbol("x^2+x+1")) == []

    def test_irrational_fixed_points_as_quadratic_numbers(self):
        from compspec.numbers import quadratic
        recs = find_fixed_points(parse_symbol("x^2-1"))
        assert recs[0].location == quadratic(F(1, 2), F(-1, 2), 5)
        assert recs[1].location == quadratic(F(1, 2), F(1, 2), 5)
        # multiplier at u = (1+sqrt5)/2 is 2u = 1 + sqrt5, repelling
        assert recs[1].multiplier == quadratic(1, 1, 5)
        assert recs[1].kind == "repelling"

    def test_degree_five_enclosures(self):
        phi = parse_symbol("x^5 - 3*x^3 + x + 1/7")
        recs = find_fixed_points(phi)
        displacement = polylib.sub(phi.rational_coeffs(), [F(0), F(1)])
        assert len(recs) == sturm.count_roots_open(displacement,
                                                   Interval.real_line())
        for rec in recs:
            if isinstance(rec.location, sturm.Enclosure):
                assert rec.location.has_sign_change()


class TestSecondIterate:
    def test_involution_sentinel(self):
        assert find_fixed_points_second_iterate(parse_symbol("-x")) == AllFixed()
        assert find_fixed_points_second_iterate(parse_symbol("-x + 7")) == AllFixed()

    def test_parabolic_quadratic_unique(self):
        recs = find_fixed_points_second_iterate(parse_symbol("-x^2+x"))
        assert locations(recs) == [0]

    def test_arctan_unique(self):
        recs = find_fixed_points_second_iterate(parse_symbol("1/2*arctan(x)"))
        assert locations(recs) == [0]

    def test_two_cycle_detected(self):
        # mu = 7/2 > 3: the quadratic has a genuine 2-cycle.
        phi = parse_symbol("-x^2+3.5*x")
        recs = find_fixed_points_second_iterate(phi)
        fixed = find_fixed_points(phi)
        assert len(recs) == 4
        assert len(fixed) == 2
        base = locations(fixed)
        extras = [r for r in recs if all(
            not r.same_point(f) for f in fixed)]
        assert len(extras) == 2
        # 2-cycle points swap under the symbol
        a, b = [r.location for r in extras]
        assert phi.eval(a) == b and phi.eval(b) == a

    def test_containment_in_second_iterate(self):
        for text in ("-x^2+4*x", "1/2*x^3+1/2*x", "-x^2+3.5*x", "x^2-1"):
            phi = parse_symbol(text)
            fixed = find_fixed_points(phi)
            fixed_sq = find_fixed_points_second_iterate(phi)
            for rec in fixed:
                assert any(rec.same_point(sq) for sq in fixed_sq)

    def test_degree_overflow(self):
        from compspec.errors import DegreeOverflow
        text = "x^70 - x^69 + x"  # squared degree 4900 > 4096
        with pytest.raises(DegreeOverflow):
            find_fixed_points_second_iterate(parse_symbol(text))


class TestDiffeo:
    def test_cubic_diffeo(self):
        verdict = is_diffeomorphism(parse_symbol("1/2*x^3+1/2*x"))
        assert verdict.value is True and verdict.certified

    def test_square_not_diffeo(self):
        verdict = is_diffeomorphism(parse_symbol("x^2"))
        assert verdict.value is False and verdict.certified
        assert "critical" in verdict.certificate

    def test_arctan_not_onto(self):
        verdict = is_diffeomorphism(parse_symbol("1/2*arctan(x)"))
        assert verdict.value is False
        assert not verdict.certified

    def test_bounded_interval_diffeo(self):
        phi = parse_symbol("-x^2+x", Interval(0, F(1, 2)))
        # increasing there, but the image (0, 1/4) is not all of (0, 1/2)
        verdict = is_diffeomorphism(phi)
        assert verdict.value is False

    def test_onto_bounded(self):
        phi = parse_symbol("-x^2+2*x", Interval(0, 1))
        verdict = is_diffeomorphism(phi)
        assert verdict.value is True and verdict.certified


class TestCriticalSet:
    def test_polynomial_always_bounded_away(self):
        assert critical_set_bounded_away(parse_symbol("x^2+x+1"), "upper") is True

    def test_exp_no_critical_points(self):
        phi = parse_symbol("exp(1/2*x)")
        assert find_critical_points(phi) == []
        assert critical_set_bounded_away(phi, "upper") is True

    def test_vacuous_translation(self):
        assert critical_set_bounded_away(parse_symbol("x+1"), "upper") is True


class TestBasin:
    def test_linear_contraction_certified(self):
        verdict = attraction_basin_check(parse_symbol("1/2*x"), Interval(-1, 1))
        assert verdict.status == "certified"

    def test_parabolic_right_basin_certified(self):
        phi = parse_symbol("-x^2+x", Interval(0, 1))
        verdict = attraction_basin_check(phi, Interval(0, F(1, 4)))
        assert verdict.status == "certified"

    def test_square_escape_witness(self):
        verdict = attraction_basin_check(parse_symbol("x^2"),
                                         Interval(F(-1, 2), F(1, 2)))
        assert verdict.status == "false"
        assert verdict.witness == 2
        assert verdict.certified

    def test_arctan_sampled(self):
        verdict = attraction_basin_check(parse_symbol("1/2*arctan(x)"),
                                         Interval(-1, 1))
        assert verdict.status == "sampled-true"

    def test_hypothesis_violation(self):
        with pytest.raises(HypothesisViolation):
            attraction_basin_check(parse_symbol("2*x"), Interval(-1, 1))


class TestSturmProperties:
    def test_random_polynomials_self_consistency(self):
        # Isolated fixed-point count matches the Sturm variation count, and
        # every enclosure refines to width below 1e-30 keeping its sign
        # change.
        rng = random.Random(2024)
        line = Interval.real_line()
        tight = F(1, 10 ** 30)
        for _ in range(200):
            degree = rng.randint(1, 8)
            coeffs = [F(rng.randint(-9, 9), rng.randint(1, 5))
                      for _ in range(degree + 1)]
            if coeffs[-1] == 0:
                coeffs[-1] = F(1)
            displacement = polylib.sub(coeffs, [F(0), F(1)])
            if polylib.is_zero(displacement) or polylib.degree(displacement) == 0:
                continue
            roots = sturm.isolate_roots(displacement, line)
            assert len(roots) == sturm.count_roots_open(displacement, line)
            for root, _mult in roots:
                if isinstance(root, sturm.Enclosure):
                    refined = root.refine(tight)
                    assert refined.width() < tight
                    assert refined.has_sign_change()

    def test_multiplicity_detection(self):
        # (x - 1)^2 (x + 2) has a double root at 1.
        p = polylib.mul(polylib.mul([F(-1), F(1)], [F(-1), F(1)]), [F(2), F(1)])
        roots = sturm.isolate_roots(p, Interval.real_line())
        assert [(r, m) for r, m in roots] == [(F(-2), 1), (F(1), 2)]


class TestConjugationInvariance:
    def test_multipliers_invariant_under_affine_change(self):
        phi = parse_symbol("-x^2+4*x")
        delta = parse_change("2*x+1")
        psi = conjugate(phi, delta)
        base = {r.location: r.multiplier for r in find_fixed_points(phi)}
        moved = find_fixed_points(psi)
        assert len(moved) == len(base)
        for rec in moved:
            original = delta.apply(rec.location)
            assert original in base
            assert base[original] == rec.multiplier

    def test_diffeo_flag_invariant(self):
        phi = parse_symbol("1/2*x^3+1/2*x")
        delta = parse_change("-1/3*x + 5")
        psi = conjugate(phi, delta)
        assert is_diffeomorphism(psi).value is True


class TestAnalyze:
    def test_sign_vs_id_set_only_without_fixed_points(self):
        up = analyze_symbol(parse_symbol("x^2+x+1"))
        assert up.sign_vs_id == "above"
        assert up.critical_bounded_away is True
        has = analyze_symbol(parse_symbol("-x^2+4*x"))
        assert has.sign_vs_id is None
        assert has.critical_bounded_away is None

    def test_diffeo_implies_no_critical_points(self):
        an = analyze_symbol(parse_symbol("1/2*x^3+1/2*x"))
        assert an.is_diffeo.value is True
        assert an.critical_points == []

    def test_certified_flags(self):
        assert analyze_symbol(parse_symbol("-x^2+x")).certified
        assert not analyze_symbol(parse_symbol("1/2*arctan(x)")).certified
