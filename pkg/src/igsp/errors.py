"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates an operation's precondition."""


class CycleError(InvalidArgumentError):
    """An arrow set does not admit a topological order."""


class InvalidMoveError(InvalidArgumentError):
    """A requested arrow reversal is not a legal covered-arrow move."""


class InsufficientSamplesError(ValueError):
    """Too few samples for the requested statistic."""


class NumericalDegeneracyError(ArithmeticError):
    """A covariance block is singular or numerically rank deficient.

    The offending variables are available as ``variables``.
    """

    def __init__(self, variables, message=None):
        self.variables = tuple(int(v) for v in variables)
        if message is None:
            message = f"degenerate covariance block over variables {list(self.variables)}"
        super().__init__(message)


class DatasetError(ValueError):
    """A manifest or data file could not be loaded."""

    def __init__(self, message, path=None, line=None):
        self.path = None if path is None else str(path)
        self.line = line
        location = ""
        if self.path is not None:
            location = self.path if line is None else f"{self.path}:{line}"
            location += ": "
        super().__init__(location + message)
