"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument lies outside its valid domain."""


class NumericError(ArithmeticError):
    """A computation cannot proceed on numerically degenerate data."""


class ConvergenceError(NumericError):
    """An iterative solve did not reach its tolerance."""

    def __init__(self, message: str, worst_residual: float):
        super().__init__(f"{message} (worst residual {worst_residual:.3e})")
        self.worst_residual = worst_residual


class UndefinedMetricError(ValueError):
    """A figure of merit cannot be computed for the given input."""
