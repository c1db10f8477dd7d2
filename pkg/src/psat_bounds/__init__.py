"""Bounded approximations to the satisfiability of monotone Boolean expressions.

The satisfiability of a monotone DNF expression (equivalently the two-terminal
reliability of a network) is approximated by truncated Inclusion-Exclusion
expansions around both endpoints, combined in the Bernstein basis and closed
off with monotone bounds and interpolants.
"""

from .errors import (
    InconsistencyError,
    LimitExceededError,
    MonotonicityError,
    ParseError,
    PsatError,
)
from .expr_core import (
    MonotoneExpression,
    dual,
    evaluate,
    format_expression,
    minimize_clauses,
    parse_expression,
)
from .lattice_oracle import (
    count_solutions,
    density_of_states,
    exact_bezier,
    exact_satisfiability,
)
from .ie_expansion import TaylorPrefix, build_unions, kappa, truncated_taylor
from .bernstein import (
    PartialBezier,
    bernstein_to_power,
    combine_dual,
    de_casteljau,
    power_to_bernstein,
    reflect,
)
from .bounds_interp import (
    BoundedEstimate,
    interpolate,
    mc_estimate_beta,
    monotone_bounds,
    series_parallel_envelope,
)
from .sat2graph import ReliabilityGraph, export_dot, min_cutsets, percolation, sat_to_graph
from .sampler import SampleReport, expression_oracle, graph_oracle, sample_minimal_sets
from .hetero import (
    birnbaum_importance,
    directional_derivative,
    gamma_matrix,
    log_decompose,
    polynomial_curve_bounds,
    rate_curve_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "BoundedEstimate",
    "InconsistencyError",
    "LimitExceededError",
    "MonotoneExpression",
    "MonotonicityError",
    "ParseError",
    "PartialBezier",
    "PsatError",
    "ReliabilityGraph",
    "SampleReport",
    "TaylorPrefix",
    "bernstein_to_power",
    "birnbaum_importance",
    "build_unions",
    "combine_dual",
    "count_solutions",
    "de_casteljau",
    "density_of_states",
    "directional_derivative",
    "dual",
    "evaluate",
    "exact_bezier",
    "exact_satisfiability",
    "export_dot",
    "expression_oracle",
    "format_expression",
    "gamma_matrix",
    "graph_oracle",
    "interpolate",
    "kappa",
    "log_decompose",
    "mc_estimate_beta",
    "min_cutsets",
    "minimize_clauses",
    "monotone_bounds",
    "parse_expression",
    "percolation",
    "polynomial_curve_bounds",
    "power_to_bernstein",
    "rate_curve_bounds",
    "reflect",
    "sample_minimal_sets",
    "sat_to_graph",
    "series_parallel_envelope",
    "truncated_taylor",
]
