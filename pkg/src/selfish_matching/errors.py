"""Exception types shared across the package."""


class SelfishMatchingError(Exception):
    """Base class for all package-specific errors."""


class NotMetricError(SelfishMatchingError):
    """Triangle (or, for bipartite instances, quadrilateral) inequality fails."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotSymmetricError(SelfishMatchingError):
    pass


class NonPositiveWeightError(SelfishMatchingError):
    pass


class OddVertexCountError(SelfishMatchingError):
    pass


class NotIncreasingError(SelfishMatchingError):
    pass


class KOutOfRangeError(SelfishMatchingError):
    pass


class EpsilonOutOfRangeError(SelfishMatchingError):
    pass


class AlphaOutOfRangeError(SelfishMatchingError):
    pass


class NTooLargeError(SelfishMatchingError):
    pass


class ParseError(SelfishMatchingError):
    pass


class ValidationError(SelfishMatchingError):
    pass


class VertexMismatchError(SelfishMatchingError):
    pass


class InstanceTooLargeError(SelfishMatchingError):
    pass


class NoEmbeddingError(SelfishMatchingError):
    pass


class NoStableMatchingError(SelfishMatchingError):
    pass


class InternalInstabilityError(SelfishMatchingError):
    pass


class InconsistentTraceError(SelfishMatchingError):
    pass
