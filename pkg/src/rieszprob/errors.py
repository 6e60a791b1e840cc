"""Exception hierarchy.

Every error raised by the library derives from :class:`RieszError`, which is
itself a :class:`ValueError` so callers validating input can catch either.
"""


class RieszError(ValueError):
    """Base class for all library errors."""


class SpaceMismatch(RieszError):
    """Operands live on different carriers."""


class EmptyCarrier(RieszError):
    pass


class NonPositiveWeight(RieszError):
    pass


class NegativeTolerance(RieszError):
    pass


class NotInvertible(RieszError):
    """An element has an atom too close to zero to be inverted.

    ``atom`` holds the index of the first offending atom.
    """

    def __init__(self, message, atom=None):
        super().__init__(message)
        self.atom = atom


class NotPositiveInvertible(NotInvertible):
    pass


class SeriesNotConverged(RieszError):
    pass


class ExpOverflow(RieszError, OverflowError):
    pass


class NotAPartition(RieszError):
    pass


class NotInRange(RieszError):
    pass


class ProbabilityOutOfRange(RieszError):
    pass


class ProductTooLarge(RieszError):
    pass


class IndexOutOfRange(RieszError, IndexError):
    pass


class NonPositiveLambda(RieszError):
    pass


class ParameterDomain(RieszError):
    pass


class HypothesisViolated(RieszError):
    def __init__(self, message, atom=None):
        super().__init__(message)
        self.atom = atom


class NotInBounds(HypothesisViolated):
    pass


class NotSubGaussianOnGrid(RieszError):
    def __init__(self, message, lam=None, margin=None):
        super().__init__(message)
        self.lam = lam
        self.margin = margin


class ConfigInvalid(RieszError):
    pass
