"""Mollifier smoothing of C0-Finsler structures.

Numerical library and CLI: standard-mollifier kernels and convolution
quadrature, asymmetric-norm bounds, vertical level-set smoothing, horizontal
chart smoothing with a partition of unity, the Chern-connection / flag
curvature pipeline, the piecewise-Riemannian curvature-concentration
experiment, and convergence sweep tooling.
"""

from .errors import (
    ConfigError,
    ConstantsViolationError,
    DegenerateFlagError,
    DerivativeOrderError,
    DomainMarginError,
    FinsmoothError,
    NotANormError,
    OracleMissingError,
    UncoveredPointError,
)
from .kernel import (
    BlendedKernel,
    MollifierKernel,
    QuadratureRule,
    convolve_partial,
    convolve_partial_derivative,
    smooth_function,
)
from .norm import (
    AsymmetricNormField,
    MinkowskiVerdict,
    NormBounds,
    check_growth_bound,
    check_minkowski,
    compute_bounds,
)
from .structures import Box, FinslerField, SmoothnessClass, norm_field, quadratic_field

__all__ = [
    "BlendedKernel",
    "Box",
    "ConfigError",
    "ConstantsViolationError",
    "DegenerateFlagError",
    "DerivativeOrderError",
    "DomainMarginError",
    "FinslerField",
    "FinsmoothError",
    "MinkowskiVerdict",
    "MollifierKernel",
    "NormBounds",
    "NotANormError",
    "OracleMissingError",
    "QuadratureRule",
    "SmoothnessClass",
    "UncoveredPointError",
    "AsymmetricNormField",
    "check_growth_bound",
    "check_minkowski",
    "compute_bounds",
    "convolve_partial",
    "convolve_partial_derivative",
    "norm_field",
    "quadratic_field",
    "smooth_function",
]

__version__ = "0.1.0"
