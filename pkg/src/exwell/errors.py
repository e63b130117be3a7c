"""Exception types shared across the package.

The CLI maps ConfigError to exit code 2 and ComputationError (and its
subclasses) to exit code 3; plain ValueError from constructors means the
caller passed something structurally invalid.
"""


class ConfigError(ValueError):
    """Bad scenario configuration. Carries the offending key and line."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        loc = ""
        if key is not None:
            loc += f" (key: {key}"
            loc += f", line {line})" if line is not None else ")"
        elif line is not None:
            loc += f" (line {line})"
        super().__init__(message + loc)


class ComputationError(RuntimeError):
    """Base class for numerical failures (exit code 3 in the CLI)."""


class ConvergenceError(ComputationError):
    """An iterative solver hit its iteration cap; carries the residual."""

    def __init__(self, message, residual=None):
        self.residual = residual
        if residual is not None:
            message += f" (residual {residual:.3e})"
        super().__init__(message)


class NearSingularShiftError(ComputationError):
    """Shifted solve attempted too close to a non-deflated eigenvalue."""


class RegimeError(ComputationError):
    """A physics precondition (perturbative window, gap condition, ...) failed."""


class GridMismatchError(ValueError):
    """Operands live on different grids."""
