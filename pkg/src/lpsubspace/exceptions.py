"""Exception hierarchy shared across the package."""


class LpSubspaceError(Exception):
    """Base class for all library errors."""


class DimensionError(LpSubspaceError):
    """Incompatible ambient or subspace dimensions."""


class ParameterError(LpSubspaceError):
    """A numeric parameter is outside its admissible range."""


class GeodesicNotUnique(LpSubspaceError):
    """Largest principal angle is pi/2, so no unique geodesic exists."""


class SingularPointError(LpSubspaceError):
    """A data point sits (numerically) on the subspace where the formula
    requires a positive distance."""


class NonDifferentiable(LpSubspaceError):
    """The energy is not differentiable at the requested point; use the
    reparametrized derivative instead."""


class ConfigError(LpSubspaceError):
    """Invalid generative-model or experiment configuration."""


class DegenerateData(LpSubspaceError):
    """The data set carries no usable geometric information."""
