"""Exception hierarchy shared by every geepower module."""


class GeePowerError(Exception):
    """Base class for all errors raised by geepower."""


class DomainError(GeePowerError, ValueError):
    """An argument lies outside the domain of a numeric routine."""


class MeanRangeError(DomainError):
    """A marginal mean falls outside the admissible range of its distribution."""


class NonMonotoneSequenceError(GeePowerError, ValueError):
    """A design-pattern row has intervention cells before control cells."""


class NotPositiveDefiniteError(GeePowerError, ArithmeticError):
    """A correlation or working covariance matrix failed Cholesky factorization."""


class SingularInformationError(GeePowerError, ArithmeticError):
    """The accumulated GEE information matrix is singular (design not identifiable)."""


class ConfigError(GeePowerError):
    """A scenario file is missing a required key or holds an unusable value."""


class ParseError(GeePowerError):
    """A scenario file could not be tokenized."""


class ValidationError(GeePowerError):
    """Raised by the high level entry points when a spec fails validation.

    The full report is kept on ``self.report``.
    """

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))
