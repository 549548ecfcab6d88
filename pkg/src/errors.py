"""Exception hierarchy shared by the simulator, fits, planner and CLI."""


class StarkTuneError(ValueError):
    """Base class. Subclasses ValueError so callers can keep catching that."""

    exit_status = 1


class ConfigError(StarkTuneError):
    """
    Invalid configuration or scenario file.

    Args:
        message: Summary line
        diagnostics: List of "path:line: field: problem" strings
    """

    exit_status = 2

    def __init__(self, message, diagnostics=None):
        self.diagnostics = list(diagnostics or [])
        if self.diagnostics:
            message = message + "\n" + "\n".join(f"  {d}" for d in self.diagnostics)
        super().__init__(message)


class DataError(StarkTuneError):
    """Malformed or inconsistent input data."""

    exit_status = 3


class DegenerateProfileError(DataError):
    """Voigt profile requested with both widths zero."""


class DegeneracyError(DataError):
    """Two electronic levels share the same energy."""


class RankDeficientError(DataError):
    """Regression design matrix does not have full rank."""


class FitError(StarkTuneError):
    """
    Fit did not converge.

    Args:
        message: Summary line
        diagnostics: Dict with optimizer status, evaluations and last parameters
    """

    exit_status = 4

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)


class NoPeakError(FitError):
    """Trace has no line above the noise."""


class InfeasiblePlanError(StarkTuneError):
    """
    Target cannot be reached.

    Args:
        message: Summary line
        binding: Name of the constraint that blocks the target
    """

    exit_status = 5

    def __init__(self, message, binding=None):
        self.binding = binding
        super().__init__(message)
