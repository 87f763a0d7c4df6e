"""Exception hierarchy.

Validation problems derive from ValueError so callers can catch them
generically; numerical failures derive from ArithmeticError.
"""


class EfimovLossError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(EfimovLossError, ValueError):
    pass


class UnitError(ValidationError):
    pass


class DomainError(ValidationError):
    """An argument lies outside the domain of a formula."""


class RangeError(ValidationError):
    """A query lies outside tabulated or declared validity ranges."""


class ParseError(ValidationError):
    pass


class InsufficientDataError(ValidationError):
    pass


class NumericalError(EfimovLossError, ArithmeticError):
    pass


class SingularResonanceError(NumericalError):
    """Exactly on resonance with zero decay width; the rate diverges."""


class IntegrationError(NumericalError):
    def __init__(self, message, t_reached=None):
        super().__init__(message)
        self.t_reached = t_reached
