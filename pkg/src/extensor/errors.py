"""Exception hierarchy shared by every layer of the library."""


class ExtensorError(Exception):
    """Base class for all library errors."""


class DimensionError(ExtensorError):
    """Operands live in algebras of different dimension."""


class GradeRangeError(ExtensorError):
    """A requested grade lies outside 0..n."""


class InvalidPairError(ExtensorError):
    """Two bases fail to be reciprocal."""


class DomainError(ExtensorError):
    """An argument has grade content outside an extensor's domain."""


class SingularExtensorError(ExtensorError):
    """An extensor is not invertible."""

    def __init__(self, message: str, determinant: float):
        super().__init__(message)
        self.determinant = determinant


class NotSymmetricError(ExtensorError):
    """A metric extensor failed the symmetry check."""


class SignatureError(ExtensorError):
    """A metric does not have the requested signature."""


class DegenerateMetricError(ExtensorError):
    """A metric has a (numerically) vanishing eigenvalue."""


class ChartError(ExtensorError):
    """A point lies outside the validity region of a chart."""


class DerivativeError(ExtensorError):
    """A numerical derivative could not be formed."""


class ConfigError(ExtensorError):
    """A geometry or extensor configuration is malformed."""


class GaugeError(ExtensorError):
    """A proposed gauge transformation does not preserve the Minkowski metric."""
