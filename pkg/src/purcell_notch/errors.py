"""Exception hierarchy. Every class carries the CLI exit code it maps to."""


class PurcellNotchError(Exception):
    exit_code = 1


class DomainError(PurcellNotchError, ValueError):
    """An argument lies outside the domain of the operation."""

    exit_code = 6


class SingularityError(DomainError):
    exit_code = 6


class PassivityError(PurcellNotchError, ArithmeticError):
    """A lossless/passive network produced negative dissipation."""

    exit_code = 7


class SearchError(PurcellNotchError, RuntimeError):
    """A root or extremum was not found inside the search window."""

    exit_code = 5


class ConfigError(PurcellNotchError, ValueError):
    exit_code = 2

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ConvergenceError(PurcellNotchError, RuntimeError):
    exit_code = 3

    def __init__(self, message, iterations=None, residuals=None):
        super().__init__(message)
        self.iterations = iterations
        self.residuals = residuals


class InfeasibleError(PurcellNotchError, ValueError):
    exit_code = 4


class ConfigFileNotFound(ConfigError):
    exit_code = 10


class ConfigParseError(ConfigError):
    exit_code = 11


class ConfigValueError(ConfigError):
    exit_code = 12


class UnknownConfigKey(ConfigError):
    exit_code = 13
