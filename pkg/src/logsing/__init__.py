"""Exact construction and certification of log-singular series solutions.

For equations d_t^m u = f(t, x, derivatives of u) whose solutions blow up
logarithmically along t = 0, this package finds the leading behavior
u ~ a(x) t^l log t, reduces the equation to a regular-singular form in the
Euler operator t*d_t, solves order by order with exact Gaussian-rational
arithmetic, certifies the residual valuation, and bounds the growth of the
depth components by an explicit majorant recurrence.  Laurent-type leading
terms with prescribed resonance data (Painleve expansions) are handled by a
separate direct mode.
"""

from .analysis import AnalysisReport, characteristic_exponent, check_assumptions
from .equation import MuIndex, PDESpec, RhsTerm, spec_from_terms
from .errors import (AssumptionError, BalanceError, CertificationError,
                     CompatibilityError, ConfigurationError,
                     EquationSyntaxError, LeadingRootError, LogsingError,
                     MissingResonanceDataError, ResonanceError)
from .fuchsian import (CharOperator, ReducedEquation, ResidualReport,
                       SolveResult, assemble_u, reduce, residual, solve_depth,
                       solve_formal, solve_linear_order)
from .grammar import parse_equation, parse_poly, parse_series
from .leading import (LeadingEquation, b_lower, beta, build_leading_equation,
                      falling, leading_roots, solve_leading)
from .majorant import (MajorantParams, MajorantSeq, derive_params,
                       majorant_sequence, nagumo_bound, radius_estimate,
                       verify_majorant)
from .prescribed import PrescribedResult, residual_series, solve_prescribed
from .scalar import INF, QQi
from .series import LogSeries, SeriesConfig, compose_polynomial
from .xpoly import XPoly

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport", "AssumptionError", "BalanceError", "CertificationError",
    "CharOperator", "CompatibilityError", "ConfigurationError",
    "EquationSyntaxError", "INF", "LeadingEquation", "LeadingRootError",
    "LogSeries", "LogsingError", "MajorantParams", "MajorantSeq",
    "MissingResonanceDataError", "MuIndex", "PDESpec", "PrescribedResult",
    "QQi", "ReducedEquation", "ResidualReport", "ResonanceError", "RhsTerm",
    "SeriesConfig", "SolveResult", "XPoly", "assemble_u", "b_lower", "beta",
    "build_leading_equation", "characteristic_exponent", "check_assumptions",
    "compose_polynomial", "derive_params", "falling", "leading_roots",
    "majorant_sequence", "nagumo_bound", "parse_equation", "parse_poly",
    "parse_series", "radius_estimate", "reduce", "residual",
    "residual_series", "solve_depth", "solve_formal", "solve_leading",
    "solve_linear_order", "solve_prescribed", "spec_from_terms",
    "verify_majorant", "__version__",
]
