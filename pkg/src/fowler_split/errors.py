"""Exception types raised by the solver."""


class FowlerSplitError(Exception):
    """Base class for all package errors."""


class NonHermitianInput(FowlerSplitError):
    """Spectral coefficients are too far from Hermitian symmetry to represent a real field."""


class ToleranceNotMet(FowlerSplitError):
    """A truncated quadrature cannot reach the requested accuracy."""


class QuadratureFailure(FowlerSplitError):
    """Adaptive quadrature did not converge within the refinement budget."""


class ZeroField(FowlerSplitError):
    """Operation requires a nonzero field."""


class NegativeTime(FowlerSplitError):
    """Flow durations must be nonnegative."""


class CflViolation(FowlerSplitError):
    """Requested explicit step exceeds the advection-diffusion stability bound."""


class BlowUpDetected(FowlerSplitError):
    """Trajectory norm exceeded the blow-up guard threshold."""


class SupportTooWide(FowlerSplitError):
    """Initial-data support does not fit on the grid with the required margin."""


class DegenerateFit(FowlerSplitError):
    """Order fit is impossible (too few points, repeated steps, or nonpositive errors)."""


class SpatialFloorReached(FowlerSplitError):
    """Measured errors are too close to the solver's self-consistency floor to fit an order."""


class InvalidConfig(FowlerSplitError):
    """Run configuration failed validation."""
