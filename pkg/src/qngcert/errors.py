"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class InvalidDistributionError(ValueError):
    """A photon-number distribution violates its invariants."""


class NonphysicalPairError(ValueError):
    """A (p0, q0, T) triple lies outside the physically allowed region."""


class NotCertifiableError(ValueError):
    """The state sits on or below the Gaussian boundary, so no finite plan exists."""
