"""Exception hierarchy for interplab."""


class InterplabError(Exception):
    """Base class for all library errors."""


class InvalidParams(InterplabError, ValueError):
    pass


class DimensionMismatch(InterplabError, ValueError):
    pass


class GramSingular(InterplabError, ArithmeticError):
    """Raised when the (alpha*I + K) system cannot be factorized or solved honestly."""

    def __init__(self, message, smallest_pivot=None, alpha=None):
        super().__init__(message)
        self.smallest_pivot = smallest_pivot
        self.alpha = alpha


class UnsupportedTarget(InterplabError, ValueError):
    pass


class ZeroTarget(InterplabError, ValueError):
    pass


class ProbabilityOutOfRange(InterplabError, ValueError):
    pass


class InvalidBracket(InterplabError, ValueError):
    pass


class DegenerateSurvival(InterplabError, ValueError):
    pass


class InvalidEigen(InterplabError, ValueError):
    pass


class EigFailure(InterplabError, ArithmeticError):
    pass


class TrialFailed(InterplabError, RuntimeError):
    pass


class EmptyResult(InterplabError, ValueError):
    pass


class ConfigError(InterplabError, ValueError):
    pass
