"""Exception hierarchy shared by every module."""


class LambertError(Exception):
    """Base class for all errors raised by :mod:`lambertcert`."""


class DomainError(LambertError, ValueError):
    """The argument lies outside the domain of the requested branch or operation."""


class PrecisionError(LambertError, ArithmeticError):
    """The working precision cannot resolve a comparison the computation depends on."""


class NumericalError(LambertError, ArithmeticError):
    """A recursion hit an excluded denominator or broke a proven monotonicity property.

    Both symptoms mean the working precision is too low for the input.
    """


class CertificationError(LambertError, ArithmeticError):
    """The a-posteriori sign check failed even after the precision retry."""
