"""Exception types raised across the library."""


class PathTransportError(Exception):
    """Base class for all library errors."""


class IntervalError(PathTransportError, ValueError):
    """A parameter interval is out of range, mismatched or non-canonical."""


class EndpointMismatchError(PathTransportError, ValueError):
    """Two paths do not meet at a common junction point."""


class ChartDomainError(PathTransportError, ValueError):
    """A base point lies outside the coordinate chart of a geometry."""


class SingularCoefficientError(PathTransportError, ValueError):
    """Non-finite connection coefficients encountered during integration."""


class NonInvertibleError(PathTransportError, ValueError):
    """A transport matrix could not be inverted."""


class InverseUnavailableError(PathTransportError, ValueError):
    """A backward transport was requested from a map with no usable inverse."""


class DegenerateProbeError(PathTransportError, ValueError):
    """Probe velocities do not span the base tangent space."""


class NotFactorizableError(PathTransportError, ValueError):
    """A transport failed the factorization criterion at some point.

    The failing verdicts are attached as the ``verdicts`` attribute.
    """

    def __init__(self, message, verdicts=()):
        super().__init__(message)
        self.verdicts = tuple(verdicts)


class NotALoopError(PathTransportError, ValueError):
    """A path does not close up within the junction tolerance."""


class NotARotationError(PathTransportError, ValueError):
    """A matrix is not a proper rotation within tolerance."""


class NotApplicableError(PathTransportError, ValueError):
    """A check requires a differentiable (linear) realization that is absent."""


class SpecFormatError(PathTransportError, ValueError):
    """A textual path/geometry/config specification could not be parsed."""
