"""
Error taxonomy for qdeform.

All library errors derive from QDeformError, itself a ValueError, so callers
that only know about ValueError keep working.
"""


class QDeformError(ValueError):
    """Base class for every qdeform domain error."""


class NonPositive(QDeformError):
    """A deformation function came out non-positive where it must be > 0."""


class DomainError(QDeformError):
    """Inputs fall outside the domain of a closed-form fit."""


class DimensionTooSmall(QDeformError):
    pass


class DimensionTooLarge(QDeformError):
    pass


class IncompatibleStatistics(QDeformError):
    """Deformation kind does not match the mode statistics (boson/fermion)."""


class NonFiniteState(QDeformError):
    pass


class InsufficientData(QDeformError):
    pass


class IllConditionedFit(QDeformError):
    pass


class SectorEmpty(QDeformError):
    pass


class NotHermitian(QDeformError):
    """Assembled Hamiltonian is not Hermitian. Signals a construction bug."""


class NegativeMassSquared(QDeformError):
    pass


class SingularCoefficient(QDeformError):
    pass


class CutoffWarning(RuntimeWarning):
    """Spectral sum truncated while its tail is still above tolerance."""
