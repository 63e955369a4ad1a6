"""Exception hierarchy.

``ValidationError`` subclasses signal bad input (CLI exit code 1);
``NumericalError`` subclasses signal a failed computation (exit code 2).
"""


class IBNLSError(Exception):
    pass


class ValidationError(IBNLSError, ValueError):
    pass


class NumericalError(IBNLSError, ArithmeticError):
    pass


class DimensionTooSmall(ValidationError):
    pass


class InhomogeneityOutOfRange(ValidationError):
    pass


class InvalidGridSpec(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class CutoffTooLarge(ValidationError):
    pass


class DegenerateField(ValidationError):
    pass


class HypothesesNotMet(ValidationError):
    """Raised by the coercivity check; ``failed`` names the violated hypotheses."""

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = tuple(failed)


class DegenerateConstants(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class NoConvergence(NumericalError):
    pass


class IndefiniteOperator(NumericalError):
    pass


class NonFinite(NumericalError):
    pass
