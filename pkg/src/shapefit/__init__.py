"""Shape-preserving polynomial and spline approximation with interpolatory
constraints, and LP certification of the matching impossibility results."""

from .core import (ChebyshevPartition, ConstraintSet, FunctionModel,
                   MembershipReport, SignPattern, SpecTuple, check_membership,
                   rate_weight, separation, validate_spec)
from .splinebuild import (BuildReport, KnotSequence, Spline, beatson_blend,
                          build_copositive_spline, build_intertwining_spline,
                          error_table, minimal_chebyshev_n)

__version__ = "0.1.0"

__all__ = [
    "ChebyshevPartition", "ConstraintSet", "FunctionModel", "MembershipReport",
    "SignPattern", "SpecTuple", "check_membership", "rate_weight", "separation",
    "validate_spec", "BuildReport", "KnotSequence", "Spline", "beatson_blend",
    "build_copositive_spline", "build_intertwining_spline", "error_table",
    "minimal_chebyshev_n", "__version__",
]
