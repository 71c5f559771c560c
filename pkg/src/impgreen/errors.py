"""Exception hierarchy shared by all modules."""


class ImpGreenError(Exception):
    """Base class for every error raised by the package."""


class DomainError(ImpGreenError, ValueError):
    """An argument lies outside the domain of the operation."""


class RegimeError(DomainError):
    """A complex extension or parameter leaves the certified analytic regime."""


class ConvergenceError(ImpGreenError, ArithmeticError):
    """An iterative or adaptive scheme failed to reach its tolerance."""


class BudgetError(ImpGreenError):
    """A compressed approximation exceeded its error budget; ``report`` holds the diagnostics."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class ConfigError(ImpGreenError, ValueError):
    """A run configuration is malformed; ``path`` names the offending field."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
