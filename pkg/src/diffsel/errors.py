"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class DegenerateInputError(ValueError):
    """An input that has probability zero under the model (e.g. a zero gain)."""


class ConfigurationError(ValueError):
    """Inconsistent or invalid simulation / experiment configuration."""
