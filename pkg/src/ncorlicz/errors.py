"""Exception types raised by ncorlicz."""


class NcOrliczError(Exception):
    """Base class for library errors."""


class InvalidParameterError(NcOrliczError, ValueError):
    """An Orlicz function or configuration was built with invalid parameters."""


class DivergentIntegralError(NcOrliczError):
    """An index integral condition fails, so the requested bound is infinite."""


class RegimeError(NcOrliczError):
    """The Orlicz indices fall outside the regime where an inequality applies."""


class DimensionError(NcOrliczError, ValueError):
    """Operators from algebras of different dimension were combined."""
