"""Exception types shared across the package."""


class AbundancyError(Exception):
    pass


class DomainError(AbundancyError, ValueError):
    """Argument outside the region where the quantity is defined."""


class RangeError(AbundancyError, IndexError):
    """Argument beyond what a PrimeTable (or a scan) covers."""


class ResourceError(AbundancyError, MemoryError):
    """Request exceeds the configured memory or scan budget."""


class PreconditionError(AbundancyError, ValueError):
    pass


class IncompleteFactorizationError(AbundancyError, ArithmeticError):
    """Trial division left a cofactor that could not be certified prime."""
