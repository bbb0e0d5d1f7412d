"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible dimensions."""


class DomainError(ValueError):
    """An action lies outside the space it is evaluated on."""


class DegenerateKernelError(ValueError):
    """A kernel parameterization has no usable amplitude."""


class DegenerateComparisonError(ValueError):
    """A preference comparison carries no information (zero variance)."""


class InfeasibleError(ValueError):
    """A requested construction admits no feasible point."""


class NumericError(RuntimeError):
    """A numerical routine failed beyond its recovery strategy."""


class TrainingError(RuntimeError):
    """Generator training produced a non-finite value."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration
