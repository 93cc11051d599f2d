"""Gronwall-type a priori bounds and Riemann-Liouville initial value problems."""

from __future__ import annotations

from .bounds import (
    BOUNDS,
    BoundCurve,
    InequalityProblem,
    compute_bound,
    cor22_bound,
    cor26_bound,
    horizon_t1,
    thm21_bound,
    thm23_bound,
    thm24_bound,
    thm25_bound,
)
from .errors import (
    BlowUpError,
    ConfigError,
    ConvergenceError,
    DomainError,
    ExprSyntaxError,
    HorizonCollapseError,
    InconclusiveError,
    IntegrabilityError,
    ProblemError,
    UnknownVariableError,
)
from .expr import Expr, evaluate, parse, to_text
from .hypotheses import (
    HypothesisReport,
    asymptotic_ratio_k,
    cor38_check,
    envelope_check,
    lp_loc_membership,
    thm37_check,
    thm310_check,
)
from .omega import PLAIN, PTH, OmegaTransform
from .operators import (
    GradedMesh,
    WeightedSample,
    frac_derivative,
    frac_integral,
    frac_integral_at,
    kernel_bound,
    kernel_diff_bound,
    phi,
)
from .solver import (
    Envelope,
    FIVPSpec,
    SolutionCurve,
    extremal_inequality_solve,
    residual,
    solve_volterra,
)
from .special import gamma, mittag_leffler, pow_safe

__all__ = [
    "BOUNDS", "PLAIN", "PTH",
    "BlowUpError", "BoundCurve", "ConfigError", "ConvergenceError", "DomainError",
    "Envelope", "Expr", "ExprSyntaxError", "FIVPSpec", "GradedMesh",
    "HorizonCollapseError", "HypothesisReport", "InconclusiveError",
    "IntegrabilityError", "InequalityProblem", "OmegaTransform", "ProblemError",
    "SolutionCurve", "UnknownVariableError", "WeightedSample",
    "asymptotic_ratio_k", "compute_bound", "cor22_bound", "cor26_bound",
    "cor38_check", "envelope_check", "evaluate", "extremal_inequality_solve",
    "frac_derivative", "frac_integral", "frac_integral_at", "gamma", "horizon_t1",
    "kernel_bound", "kernel_diff_bound", "lp_loc_membership", "mittag_leffler",
    "parse", "phi", "pow_safe", "residual", "solve_volterra", "thm21_bound",
    "thm23_bound", "thm24_bound", "thm25_bound", "thm37_check", "thm310_check",
    "to_text",
]
