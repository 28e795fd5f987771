"""Extremal values of the Riemann zeta function near the 1-line and beyond."""

from .constants import CertifiedRoot, character_table, l_function, solve_A, solve_E, solve_l_bound, solve_sigma_a, solve_sigma_one, verified_bisect
from .curves import (
    CurveSegment,
    LimitFunction,
    TurningPoint,
    Window,
    ZetaFunction,
    check_inequality_A3,
    check_u_bound,
    find_turning_points,
    solve_u_of_t,
    trace_real_curves,
    verify_turning_bound,
    winding_number,
)
from .errors import (
    DependentRowsError,
    DomainError,
    NoRootError,
    NoSentinelRowError,
    NoTurningPointError,
    PrecisionEscalationError,
    RedirectError,
    ZeroOnContourError,
    ZetaBoundError,
)
from .height_search import LatticeParams, build_lattice, extract_heights, lll_reduce, paired_search, refine_root, search_report, verify_height
from .numerics import PrecisionContext, format_decimal, parse_decimal
from .zeta_eval import EulerProduct, EvalResult, limit_function_half, log_zeta, prime_zeta, zeta, zeta_jet, zeta_log_derivative

__version__ = "0.1.0"

__all__ = [
    "CertifiedRoot",
    "CurveSegment",
    "DependentRowsError",
    "DomainError",
    "EulerProduct",
    "EvalResult",
    "LatticeParams",
    "LimitFunction",
    "NoRootError",
    "NoSentinelRowError",
    "NoTurningPointError",
    "PrecisionContext",
    "PrecisionEscalationError",
    "RedirectError",
    "TurningPoint",
    "Window",
    "ZeroOnContourError",
    "ZetaBoundError",
    "ZetaFunction",
    "build_lattice",
    "character_table",
    "check_inequality_A3",
    "check_u_bound",
    "extract_heights",
    "find_turning_points",
    "format_decimal",
    "l_function",
    "limit_function_half",
    "lll_reduce",
    "log_zeta",
    "paired_search",
    "parse_decimal",
    "prime_zeta",
    "refine_root",
    "search_report",
    "solve_A",
    "solve_E",
    "solve_l_bound",
    "solve_sigma_a",
    "solve_sigma_one",
    "solve_u_of_t",
    "trace_real_curves",
    "verified_bisect",
    "verify_height",
    "verify_turning_bound",
    "winding_number",
    "zeta",
    "zeta_jet",
    "zeta_log_derivative",
]
