"""Exception types shared across the package."""


class FinsmoothError(Exception):
    """Base class for package errors."""


class DerivativeOrderError(FinsmoothError):
    """Requested derivative order exceeds what the implementation supports."""


class DomainMarginError(FinsmoothError):
    """Convolution point too close to the domain boundary for the kernel radius."""


class NotANormError(FinsmoothError):
    """Sampled values violate the asymmetric-norm axioms (e.g. nonpositive on the sphere)."""


class ConstantsViolationError(FinsmoothError):
    """Radial bracketing failed; smoothing constants (tau, bounds) are misconfigured."""


class DegenerateFlagError(FinsmoothError):
    """Flag denominator below tolerance (flagpole and transverse almost collinear)."""


class UncoveredPointError(FinsmoothError):
    """Evaluation point not covered by the chart partition."""


class OracleMissingError(FinsmoothError):
    """Requested sweep quantity needs an analytic oracle the entry does not provide."""


class ConfigError(FinsmoothError):
    """Malformed or unknown keys in a sweep configuration document."""
