import json
from fractions import Fraction as F

import pytest

from compspec.errors import HypothesisViolation
from compspec.intervals import NEG_INF, POS_INF, Interval
from compspec.numbers import GaussianRational
from compspec.rootwork import analyze_symbol
from compspec.symbols import conjugate, parse_change, parse_symbol
from compspec.taxonomy import (AllPlane, ClassificationReport, ClosedDisk,
                               CoverPiece, FiniteSet, Powers, PuncturedPlane,
                               RealRay, SupersetOf, covering_obstruction,
                               kernel_dim, point_spectrum, quadratic_spectrum,
                               spectrum, spectrum_lower_bound)

# Probe grid for membership coherence: 64 exact values.
PROBES = [GaussianRational(F(a, b), F(c, d))
          for a in (-2, 0, 1, 3) for b in (1, 2)
          for c in (-1, 0, 2, 5) for d in (1, 3)][:64]


class TestPointSpectrum:
    def test_exponential_all_nonzero(self):
        sigma_p, eigen = point_spectrum(analyze_symbol(parse_symbol("exp(1/2*x)")))
        assert sigma_p == PuncturedPlane()
        assert eigen.dimension(F(3)).tag == "A(T)"
        assert eigen.dimension(F(0)).kind == "zero"

    def test_arctan_powers(self):
        sigma_p, eigen = point_spectrum(analyze_symbol(parse_symbol("1/2*arctan(x)")))
        assert sigma_p == Powers(F(1, 2), include_zero=False)
        assert eigen.dimension(F(1, 8)).k == 1
        assert eigen.dimension(F(1, 3)).kind == "zero"

    def test_involution_even_functions(self):
        sigma_p, eigen = point_spectrum(analyze_symbol(parse_symbol("-x")))
        assert sigma_p == FiniteSet((F(-1), F(1)))
        assert eigen.dimension(F(-1)).tag == "A_+(R)"

    def test_cubic_constants_only(self):
        sigma_p, eigen = point_spectrum(analyze_symbol(parse_symbol("1/2*x^3+1/2*x")))
        assert sigma_p == FiniteSet((F(1),))
        assert eigen.dimension(F(1)).k == 1


class TestSpectrumLowerBound:
    def test_square_map(self):
        lower = spectrum_lower_bound(analyze_symbol(parse_symbol("x^2")))
        assert lower.contains(F(0))
        assert lower.contains(F(1))
        assert lower.contains(F(8))       # 2^3
        assert not lower.contains(F(3))

    def test_wide_quadratic(self):
        lower = spectrum_lower_bound(analyze_symbol(parse_symbol("-x^2+4*x")))
        for probe in (F(0), F(1), F(16), F(-8), F(4)):
            assert lower.contains(probe)
        assert not lower.contains(F(3))

    def test_identity(self):
        lower = spectrum_lower_bound(analyze_symbol(parse_symbol("x")))
        assert lower.contains(F(1))
        assert not lower.contains(F(0))


CATALOG = [
    ("exp(1/2*x)", "Cor 3.1(b)", AllPlane(), PuncturedPlane(), True),
    ("x+1", "Cor 3.1(a)", PuncturedPlane(), PuncturedPlane(), True),
    ("x^2+x+1", "Cor 3.1(b)", AllPlane(), PuncturedPlane(), True),
    ("1/2*arctan(x)", "Cor 3.6", Powers(F(1, 2), include_zero=True),
     Powers(F(1, 2), include_zero=False), True),
    ("-x", "Thm 2.2(b2)", FiniteSet((F(-1), F(1))), FiniteSet((F(-1), F(1))), True),
    ("x", "Thm 2.2(b3)", FiniteSet((F(1),)), FiniteSet((F(1),)), True),
    ("1/2*x^3+1/2*x", "Prop 3.9", PuncturedPlane(), FiniteSet((F(1),)), True),
    ("x^2", "Prop 3.12", AllPlane(), FiniteSet((F(1),)), True),
    ("x^3", "Prop 3.12", AllPlane(), FiniteSet((F(1),)), True),
    ("-x^2+x", "Prop 4.1",
     SupersetOf((FiniteSet((F(0),)), RealRay(F(1), True))),
     FiniteSet((F(1),)), False),
    ("-x^2+1.5*x", "Prop 4.4", AllPlane(), FiniteSet((F(1),)), True),
    # mu = 2 sits in the same band, but the map is affinely conjugate to the
    # square map, so the power leaf fires first; the sets agree either way.
    ("-x^2+2*x", "Prop 3.12", AllPlane(), FiniteSet((F(1),)), True),
    ("-x^2+4*x", "Prop 4.5",
     SupersetOf((ClosedDisk(F(1)), Powers(F(4)), Powers(F(-2)))),
     FiniteSet((F(1),)), False),
]


class TestSpectrumCatalog:
    @pytest.mark.parametrize("text,case,sigma,sigma_p,resolved", CATALOG)
    def test_catalog_entry(self, text, case, sigma, sigma_p, resolved):
        report = spectrum(parse_symbol(text))
        assert report.case_id == case
        assert report.sigma == sigma
        assert report.sigma_p == sigma_p
        assert report.resolved is resolved
        assert (report.open_problem is not None) == (not resolved)

    @pytest.mark.parametrize("text,case,sigma,sigma_p,resolved", CATALOG)
    def test_membership_coherence(self, text, case, sigma, sigma_p, resolved):
        report = spectrum(parse_symbol(text))
        for lam in PROBES:
            if report.sigma_p.contains(lam):
                assert report.sigma.contains(lam), f"{text}: {lam}"

    @pytest.mark.parametrize("text,case,sigma,sigma_p,resolved", CATALOG)
    def test_zero_membership_iff_not_diffeo(self, text, case, sigma, sigma_p,
                                            resolved):
        analysis = analyze_symbol(parse_symbol(text))
        report = spectrum(analysis)
        if analysis.is_diffeo.value is True:
            assert not report.sigma.contains(F(0))
        elif analysis.is_diffeo.value is False:
            assert report.sigma.contains(F(0))

    @pytest.mark.parametrize("text,case,sigma,sigma_p,resolved", CATALOG)
    def test_json_round_trip(self, text, case, sigma, sigma_p, resolved):
        report = spectrum(parse_symbol(text))
        doc = json.loads(json.dumps(report.to_json_dict()))
        assert ClassificationReport.from_json_dict(doc) == report

    def test_totality_on_odd_inputs(self):
        # Neutral multipliers and scan-based analyses still yield reports.
        for text in ("sin(x)", "x - x^3", "x^2 - 1", "-x^2+3*x", "exp(x)-1"):
            report = spectrum(parse_symbol(text))
            assert isinstance(report, ClassificationReport)

    def test_unresolved_reports_use_superset(self):
        report = spectrum(parse_symbol("x - x^3"))
        if not report.resolved:
            assert isinstance(report.sigma, SupersetOf)

    def test_resolved_iff_sigma_not_superset(self):
        symbols = [text for text, *_ in CATALOG]
        symbols += ["sin(x)", "x - x^3", "x^2 - 1", "-x^2+3*x"]
        for text in symbols:
            report = spectrum(parse_symbol(text))
            assert report.resolved == (not isinstance(report.sigma, SupersetOf))


class TestQuadraticSpectrum:
    def test_parabolic_partial(self):
        report = quadratic_spectrum(F(1))
        assert report.open_problem == "Prop 4.1 partial"
        assert report.sigma.contains(F(0))
        assert report.sigma.contains(F(5))
        assert not report.sigma.contains(F(1, 2))

    def test_band_full_plane(self):
        assert quadratic_spectrum(F(3, 2)).sigma == AllPlane()
        assert quadratic_spectrum(F(2)).sigma == AllPlane()

    def test_wide_partial(self):
        report = quadratic_spectrum(F(4))
        assert report.open_problem == "Prop 4.5 partial"
        disk_point = GaussianRational(F(1, 2), F(1, 2))
        assert report.sigma.contains(disk_point)
        assert report.sigma.contains(F(16))
        assert report.sigma.contains(F(4))
        assert not report.sigma.contains(F(3))

    def test_neutral_companion_ratio_at_three(self):
        report = quadratic_spectrum(F(3))
        assert report.sigma.contains(F(-1))   # (2 - mu)^1
        assert report.sigma.contains(F(9))

    def test_rejects_below_one(self):
        with pytest.raises(ValueError):
            quadratic_spectrum(F(1, 2))

    def test_irrational_parameter_path(self):
        # x^2 - 1 has fixed points (1 +- sqrt5)/2 and normal-form parameter
        # 1 + sqrt5 > 2: the wide-quadratic partial leaf, kept exact.
        from compspec.numbers import quadratic
        report = spectrum(parse_symbol("x^2-1"))
        assert report.case_id == "Prop 4.5"
        golden = quadratic(1, 1, 5)
        assert report.sigma.contains(golden)            # mu^1
        assert report.sigma.contains(golden * golden)   # mu^2
        assert report.sigma.contains(F(1, 2))           # inside the disk
        assert not report.sigma.contains(F(3))
        doc = json.loads(json.dumps(report.to_json_dict()))
        assert ClassificationReport.from_json_dict(doc) == report


class TestConjugationInvariance:
    AFFINE_PAIRS = [
        ("-x^2+4*x", "2*x+1"),
        ("-x^2+1.5*x", "-x+3"),
        ("x^2", "1/2*x"),
        ("1/2*x^3+1/2*x", "3*x-2"),
        ("1/2*arctan(x)", "2*x"),
    ]

    @pytest.mark.parametrize("phi_text,delta_text", AFFINE_PAIRS)
    def test_affine_pairs_reports_identical(self, phi_text, delta_text):
        phi = parse_symbol(phi_text)
        delta = parse_change(delta_text)
        psi = conjugate(phi, delta)
        assert spectrum(psi).to_json_dict() == spectrum(phi).to_json_dict()

    @pytest.mark.parametrize("s", [2, 3])
    def test_transcendental_pairs_match_up_to_certification(self, s):
        phi = parse_symbol(f"x^{s}")
        delta = parse_change("exp(x) - exp(-x)")
        psi = conjugate(phi, delta)
        base = spectrum(phi).to_json_dict()
        moved = spectrum(psi).to_json_dict()
        assert moved["certified"] is False
        for key in ("case", "sigma", "sigma_p", "eigen", "resolved",
                    "open_problem"):
            assert moved[key] == base[key]

    def test_inverse_symbol_duality(self):
        # The spectra of a diffeomorphism and its inverse are reciprocal
        # sets, checked on the probe grid.
        pairs = [("1/2*x", "2*x"), ("x+1", "x-1"), ("-x", "-x")]
        contraction = spectrum(parse_symbol("1/2*x"))
        assert contraction.sigma == Powers(F(1, 2))
        for forward_text, inverse_text in pairs:
            forward = spectrum(parse_symbol(forward_text))
            backward = spectrum(parse_symbol(inverse_text))
            for lam in PROBES:
                if lam == 0:
                    continue
                inv = GaussianRational(1, 0) / lam
                assert forward.sigma.contains(lam) == \
                    backward.sigma.contains(inv), (forward_text, lam)


class TestKernelDim:
    def test_arctan_power(self):
        label = kernel_dim(parse_symbol("1/2*arctan(x)"), Interval.real_line(),
                           F(1, 8))
        assert label.finite and label.value == 1

    def test_arctan_off_spectrum(self):
        label = kernel_dim(parse_symbol("1/2*arctan(x)"), Interval.real_line(),
                           F(1, 3))
        assert label.finite and label.value == 0

    def test_quadratic_band_interior_interval(self):
        phi = parse_symbol("-x^2+1.5*x")
        label = kernel_dim(phi, Interval(F(0), F(1, 2)), F(7))
        assert not label.finite and label.value == "A(T)"

    def test_involution_even_space(self):
        label = kernel_dim(parse_symbol("-x"), Interval.real_line(), F(1))
        assert not label.finite and label.value == "A_+(R)"

    def test_lambda_zero_conventions(self):
        # Superattracting unique fixed point: dimension one; otherwise zero.
        assert kernel_dim(parse_symbol("x^2"), Interval(-1, 1), F(0)).value == 1
        assert kernel_dim(parse_symbol("1/2*x"), Interval.real_line(),
                          F(0)).value == 0

    def test_invariance_required(self):
        from compspec.errors import InvarianceFailure
        with pytest.raises(InvarianceFailure):
            kernel_dim(parse_symbol("-x^2+4*x"), Interval(0, 1), F(2))


class TestCoveringObstruction:
    X3_PIECES = [CoverPiece((Interval(NEG_INF, F(0)),)),
                 CoverPiece((Interval(F(-1), F(1)),)),
                 CoverPiece((Interval(F(0), POS_INF),))]

    @pytest.mark.parametrize("lam", [F(2), F(-1), F(1, 2), GaussianRational(0, 1)])
    def test_cubic_power_not_surjective(self, lam):
        obstruction = covering_obstruction(parse_symbol("x^3"), lam,
                                           self.X3_PIECES)
        assert obstruction.verdict == "NotSurjective"
        assert all(k.finite for k in obstruction.piece_kernels)
        assert any(not k.finite for _, _, _, k in
                   obstruction.intersection_kernels)
        assert obstruction.invariance_certified

    @pytest.mark.parametrize("mu_text,mu", [("-x^2+1.5*x", F(3, 2)),
                                            ("-x^2+2*x", F(2))])
    @pytest.mark.parametrize("lam", [F(2), F(-1)])
    def test_band_quadratics_not_surjective(self, mu_text, mu, lam):
        phi = parse_symbol(mu_text)
        pieces = [CoverPiece((Interval(NEG_INF, mu - 1), Interval(F(1), POS_INF)),
                             determining=Interval(NEG_INF, mu - 1),
                             note="values on (1, inf) mirror the left branch"),
                  CoverPiece((Interval(F(0), mu),))]
        obstruction = covering_obstruction(phi, lam, pieces)
        assert obstruction.verdict == "NotSurjective"

    def test_single_piece_inconclusive(self):
        obstruction = covering_obstruction(
            parse_symbol("1/2*arctan(x)"), F(2),
            [CoverPiece((Interval.real_line(),))])
        assert obstruction.verdict == "Inconclusive"

    def test_coverage_enforced(self):
        with pytest.raises(HypothesisViolation):
            covering_obstruction(parse_symbol("x^3"), F(2),
                                 [CoverPiece((Interval(NEG_INF, F(0)),)),
                                  CoverPiece((Interval(F(0), POS_INF),))])

    def test_even_power_reduction_pieces(self):
        # Even exponent: the punctured line with the determining positive
        # half, against the unit interval.
        phi = parse_symbol("x^2")
        pieces = [CoverPiece((Interval(NEG_INF, F(0)), Interval(F(0), POS_INF)),
                             determining=Interval(F(0), POS_INF),
                             note="negative values determined by x -> x^2"),
                  CoverPiece((Interval(F(-1), F(1)),))]
        obstruction = covering_obstruction(phi, F(3), pieces)
        assert obstruction.verdict == "NotSurjective"
