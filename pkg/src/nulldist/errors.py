"""Exception types shared across the package."""


class NullDistError(Exception):
    """Base class for package-specific errors."""


class DomainError(NullDistError):
    """A point, vector, or parameter lies outside the model's domain."""


class ModelKindError(NullDistError):
    """Operation not supported for this spacetime model kind."""


class QuadratureError(NullDistError):
    """Adaptive quadrature failed to converge to the requested tolerance."""


class RootFindError(NullDistError):
    """Bracketing or root refinement failed."""


class ConnectivityError(NullDistError):
    """No connecting curve of the requested type could be constructed."""


class CurveError(NullDistError):
    """A curve failed causality validation or is structurally malformed."""
