"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DivergenceError -> 2,
OSError -> 3.
"""


class ConfigError(ValueError):
    """Invalid parameter, config field, or input data."""


class DivergenceError(RuntimeError):
    """A numerical quantity left its admissible range during a run."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class EstimationError(RuntimeError):
    """Driver-weight estimation could not produce a usable result."""
