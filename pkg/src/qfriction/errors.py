"""Exception hierarchy shared by the library and the command line."""


class QFrictionError(Exception):
    """Base class for all errors raised by qfriction."""


class DomainError(QFrictionError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ConfigError(DomainError):
    """A simulation or run configuration is inconsistent."""


class NumericError(QFrictionError, ArithmeticError):
    """A numerical procedure (root finding, integration) failed."""
