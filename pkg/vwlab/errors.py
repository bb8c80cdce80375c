"""
Error types shared by the lab.

Every error a user can provoke with a scenario or with bad arguments derives
from FatalError and carries the process exit status the command line tool
reports for it.
"""

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_ANALYSIS = 2
EXIT_IO = 3


class FatalError(RuntimeError):
    """
    Wrapper class for runtime errors that aren't caused by internal bugs, but by
    scenario content, arguments or numerical limits.
    """
    exit_code = EXIT_ANALYSIS

    def __init__(self, message):
        RuntimeError.__init__(self, message)


class ConfigurationError(FatalError, ValueError):
    """Unknown identifiers and inconsistent options."""
    exit_code = EXIT_VALIDATION


class DomainError(FatalError, ValueError):
    """An argument lies outside the domain of an operation."""
    exit_code = EXIT_VALIDATION


class ValidationError(FatalError, ValueError):
    """
    One or more invariant violations. The full list is kept in `violations`
    so callers can report all of them at once.
    """
    exit_code = EXIT_VALIDATION

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        FatalError.__init__(self, '; '.join(self.violations))


class ScenarioError(ValidationError):
    """Scenario file could not be parsed or resolved."""


class ResolutionError(FatalError):
    """The time grid cannot resolve the scaled mollifier."""


class SolverError(FatalError):
    """Step budget exhausted while integrating one mode."""

    def __init__(self, beta, min_step, steps):
        self.beta = beta
        self.min_step = min_step
        self.steps = steps
        FatalError.__init__(
            self, 'step budget exceeded for beta={:.6g}: {} steps, min dt reached {:.3e}'.format(beta, steps, min_step))


class GevreyOverflowError(FatalError):
    """Exponential spectral weight exceeds the configured cap."""

    def __init__(self, mode, exponent, cap):
        self.mode = mode
        self.exponent = exponent
        FatalError.__init__(self, 'overflow at mode {} (exponent {:.6g} > cap {:g})'.format(mode, exponent, cap))


class AnalysisError(FatalError):
    """An analysis could not produce a result."""


class NotFoundError(FatalError, LookupError):
    exit_code = EXIT_IO


class StorageError(FatalError, OSError):
    exit_code = EXIT_IO
