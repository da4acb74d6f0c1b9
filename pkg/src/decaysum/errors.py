"""Exception types raised across the package."""


class DecaySumError(Exception):
    """Base class for all errors raised by decaysum."""


class DomainError(DecaySumError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class NormalizationError(DomainError):
    """Weights are not normalized so that f(1) = 1."""


class EmptyInputError(DomainError):
    """A series or stream of length zero was supplied."""


class DimensionError(DecaySumError, ValueError):
    """Vector length does not match the factor's horizon."""


class SizeGuardError(DecaySumError, ValueError):
    """Refusing to materialize a dense matrix beyond the size guard."""


class StreamExhaustedError(DecaySumError, RuntimeError):
    """A streaming mechanism was stepped past its horizon."""


class ConfigError(DecaySumError, ValueError):
    """Invalid user configuration (CLI flags, distribution names, ...)."""
