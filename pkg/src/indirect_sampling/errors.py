"""Exception hierarchy shared by all modules."""


class SamplingError(Exception):
    """Base class for every error raised by this package."""


class InvalidConfig(SamplingError, ValueError):
    pass


class OutOfRangeTime(SamplingError, ValueError):
    pass


class PreconditionViolated(SamplingError, ValueError):
    pass


class NumericalFailure(SamplingError, ArithmeticError):
    pass


class DegenerateDenominator(NumericalFailure):
    pass


class BudgetExceedsGrid(SamplingError, ValueError):
    pass


class BudgetTooSmall(SamplingError, ValueError):
    pass


class SearchSpaceTooLarge(SamplingError, RuntimeError):
    pass
