"""Exception types shared across the package."""


class LogpartError(Exception):
    """Base class for all errors raised by this package."""


class ModelFormatError(LogpartError):
    """A model or graph file (or in-memory model) violates the format rules.

    ``line`` is the 1-based line number in the source text when the error
    was detected while parsing, else None.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NegativeWeight(ModelFormatError):
    """An edge weight or potential entry is negative (all must be >= 0)."""


class ValidationError(LogpartError):
    """An argument violates a documented precondition."""


class DisconnectedGraphError(ValidationError):
    """The operation requires a connected graph."""


class CapExceeded(LogpartError):
    """An enumeration or size cap would be exceeded; raise instead of grinding."""


class EdgeUncovered(LogpartError):
    """A weighted edge has zero probability under the tree distribution in use.

    The reweighted upper bound divides by that probability, so the estimate
    is undefined; callers must supply a covering distribution or resample.
    """

    def __init__(self, edge, message=None):
        super().__init__(message or f"edge {edge} carries weight but has zero coverage")
        self.edge = edge
