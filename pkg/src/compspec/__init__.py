"""Spectra of composition operators on real analytic functions.

Certified classification of sigma(C) and sigma_p(C) for C f = f o phi,
exact formal solutions of f(phi(x)) - lambda*f(x) = gamma(x) at fixed
points, Koenigs linearization, dynamical continuation of local solutions,
and covering obstructions to surjectivity.
"""

from .continuation import (GlobalSolution, evaluate, extend_forward,
                           extend_inverse_branch, extend_mirror, globalize,
                           orbit_sum_check, preimage_orbit,
                           prop45_witness_demo, telescoping_check)
from .intervals import Interval
from .numbers import GaussianRational, QuadraticNumber, parse_gaussian
from .power_series import (Converges, Diverges, Inconclusive, TruncatedSeries,
                           estimate_radius)
from .rootwork import (AllFixed, BasinVerdict, DiffeoVerdict, FixedPointRecord,
                       SymbolAnalysis, analyze_symbol, attraction_basin_check,
                       critical_set_bounded_away, find_critical_points,
                       find_fixed_points, find_fixed_points_second_iterate,
                       is_diffeomorphism)
from .solver import (LocalSolution, eigenfunction, koenigs,
                     quadratic_id_recurrence, smajdor_condition, solve_formal)
from .symbols import (AnalyticSymbol, Diffeomorphism, NoFixedPoints,
                      QuadraticNormalForm, conjugate, identity_symbol,
                      normalize_quadratic, parse_change, parse_rhs,
                      parse_symbol)
from .taxonomy import (ClassificationReport, CoverPiece, CoveringObstruction,
                       KernelDimLabel, covering_obstruction, kernel_dim,
                       point_spectrum, quadratic_spectrum, spectrum,
                       spectrum_lower_bound)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
