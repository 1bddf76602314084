"""Exception types raised across the package."""


class GraphParseError(ValueError):
    """A graph, partition, or flag file could not be parsed.

    Carries the offending line number (1-based) when one is known.
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        prefix = ""
        if path is not None:
            prefix += f"{path}:"
        if line is not None:
            prefix += f"{line}:"
        super().__init__(f"{prefix} {message}" if prefix else message)


class NumericError(RuntimeError):
    """A numeric routine failed to produce a usable result.

    Raised for eigensolver non-convergence and non-finite training losses.
    """


class UndefinedMetricError(ValueError):
    """A metric is undefined for the given input (e.g. no positive edges)."""
