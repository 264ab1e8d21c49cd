"""Exception hierarchy shared by every module."""


class CapacityLabError(Exception):
    """Base class for all errors raised by capacitylab."""


class ZeroVector(CapacityLabError, ValueError):
    pass


class DimensionZero(CapacityLabError, ValueError):
    pass


class DimensionMismatch(CapacityLabError, ValueError):
    pass


class DimensionTooSmall(CapacityLabError, ValueError):
    pass


class DimensionTooLarge(CapacityLabError, ValueError):
    pass


class NotDensityOperator(CapacityLabError, ValueError):
    pass


class NotUnitary(CapacityLabError, ValueError):
    pass


class NotBasis(CapacityLabError, ValueError):
    pass


class InvalidPermutation(CapacityLabError, ValueError):
    pass


class OrthogonalLink(CapacityLabError, ValueError):
    """A consecutive pair in a holonomy loop has vanishing overlap."""


class UnsupportedDimension(CapacityLabError, ValueError):
    pass


class BoundarySingularity(CapacityLabError, ValueError):
    """Fisher-Rao metric evaluated at the simplex boundary along a moving direction."""


class InvalidParameters(CapacityLabError, ValueError):
    pass


class Overflow(CapacityLabError, OverflowError):
    pass


class OutOfRange(CapacityLabError, ValueError):
    pass


class NotUnbiased(CapacityLabError, ValueError):
    pass


class InfeasibleData(CapacityLabError, ValueError):
    """No phase assignment reproduces the observed probabilities."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UnknownSuite(CapacityLabError, KeyError):
    pass
