"""Exception types shared across the package."""


class UlrIdentError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(UlrIdentError, ValueError):
    """Malformed problem definition or configuration input."""


class MomentUndefined(UlrIdentError):
    """Requested moment is infinite or does not exist for the family."""


class OrderExceeded(UlrIdentError):
    """Requested moment order is above the table/closed-form cap."""


class DegenerateComponent(UlrIdentError):
    """A component has zero variance where positive variance is required."""


class AllZeroCoefficients(UlrIdentError):
    """Both coefficient vectors vanish identically."""


class DegenerateTau(UlrIdentError):
    """The squared coefficient multisets coincide, so tau vanishes identically."""


class RootIsolationFailure(UlrIdentError):
    """Root finding could not separate nearby candidate roots reliably."""


class PreconditionUnmet(UlrIdentError):
    """A theorem hypothesis required by the operation does not hold."""


class SigmaNotPD(ValidationError):
    """A covariance-like matrix is not symmetric positive definite."""


class NotSamplable(UlrIdentError):
    """The problem involves a moment-only spec without a sampler."""
