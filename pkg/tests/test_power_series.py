import random
from fractions import Fraction as F

import pytest

from compspec.errors import CenterMismatch
from compspec.power_series import (Converges, Diverges, Inconclusive,
                                   TruncatedSeries, estimate_radius)


def brute_force_poly_compose(outer, inner, order):
    """Independent oracle: expand sum_n outer[n] * inner(x)**n by plain
    polynomial multiplication and truncate."""
    def pmul(a, b):
        out = [F(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return out[:order + 1]

    result = [F(0)] * (order + 1)
    power = [F(1)]
    for c in outer:
        for k, p in enumerate(power):
            if k <= order:
                result[k] += c * p
        power = pmul(power, inner)
    return result


def test_compose_identity_like():
    # f = x composed with the jet of x - x^2 at 0 returns that jet
    f = TruncatedSeries(F(0), [F(0), F(1), F(0), F(0)])
    g = TruncatedSeries(F(0), [F(0), F(1), F(-1), F(0)])
    assert f.compose(g).coeffs == g.coeffs


def test_compose_square_of_half():
    f = TruncatedSeries(F(0), [F(0), F(0), F(1)])
    g = TruncatedSeries(F(0), [F(0), F(1, 2), F(0)])
    assert f.compose(g).coeffs == (F(0), F(0), F(1, 4))


def test_compose_geometric_against_brute_force():
    # sum x^n composed with x - x^2, truncated at order 4
    outer = [F(1)] * 5
    inner = [F(0), F(1), F(-1)]
    expected = brute_force_poly_compose(outer, inner, 4)
    f = TruncatedSeries(F(0), outer)
    g = TruncatedSeries(F(0), inner + [F(0), F(0)])
    assert list(f.compose(g).coeffs) == expected == [F(1), F(1), F(0), F(-1), F(-1)]


def test_compose_random_against_brute_force():
    rng = random.Random(7)
    for _ in range(25):
        order = rng.randint(2, 8)
        outer = [F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(order + 1)]
        inner = [F(0)] + [F(rng.randint(-3, 3), rng.randint(1, 2))
                          for _ in range(order)]
        f = TruncatedSeries(F(0), outer)
        g = TruncatedSeries(F(0), inner)
        assert list(f.compose(g).coeffs) == brute_force_poly_compose(
            outer, inner, order)


def test_compose_center_mismatch():
    f = TruncatedSeries(F(1), [F(1), F(1)])
    g = TruncatedSeries(F(0), [F(0), F(1)])
    with pytest.raises(CenterMismatch):
        f.compose(g)


def test_mul_and_reciprocal():
    f = TruncatedSeries(F(0), [F(1), F(2), F(3)])
    inv = f.reciprocal()
    assert (f * inv).coeffs == (F(1), F(0), F(0))


def test_reversion_round_trip():
    f = TruncatedSeries(F(0), [F(0), F(2), F(1), F(-1), F(1, 3)])
    g = f.reversion()
    assert g.center == F(0)
    # g o f = identity through the order
    comp = g.compose(f)
    assert comp.coeffs == (F(0), F(1), F(0), F(0), F(0))


def test_reversion_shifted_center():
    f = TruncatedSeries(F(1), [F(3), F(1), F(5)])  # value 3 at center 1
    g = f.reversion()
    assert g.center == F(3)
    assert g.coeffs[0] == F(1)
    assert g.compose(f).coeffs == (F(1), F(1), F(0))


def test_integrate_differentiate():
    f = TruncatedSeries(F(0), [F(1), F(2), F(3)])
    assert f.integrate().differentiate().coeffs == f.coeffs


def test_radius_geometric_converges_near_one():
    series = TruncatedSeries(F(0), [F(1)] * 33)
    verdict = estimate_radius(series)
    assert isinstance(verdict, Converges)
    assert abs(verdict.radius_estimate - 1) < 0.1


def test_radius_polynomial_tail_is_entire():
    series = TruncatedSeries(F(0), [F(1), F(-2)] + [F(0)] * 31)
    verdict = estimate_radius(series)
    assert isinstance(verdict, Converges)
    assert verdict.radius_estimate is None


def test_radius_factorial_diverges():
    import math
    series = TruncatedSeries(F(0), [F(math.factorial(max(n - 1, 0)))
                                    for n in range(33)])
    verdict = estimate_radius(series)
    assert isinstance(verdict, Diverges)
    assert verdict.certificate["test"] == "factorial-growth"


def test_radius_requires_order_16():
    with pytest.raises(ValueError):
        estimate_radius(TruncatedSeries(F(0), [F(1)] * 10))


def test_radius_inconclusive_mixed_growth():
    rng = random.Random(3)
    coeffs = [F(rng.randint(1, 5)) ** (n ** 2 % 7) for n in range(33)]
    verdict = estimate_radius(TruncatedSeries(F(0), coeffs))
    assert isinstance(verdict, (Inconclusive, Converges))


def test_json_round_trip():
    series = TruncatedSeries(F(1, 2), [F(1), F(-2, 3), F(5)])
    doc = series.to_json_dict()
    back = TruncatedSeries.from_json_dict(doc)
    assert back == series
