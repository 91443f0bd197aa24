"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(ValueError):
    """Inputs violate a stated precondition of a closed-form result."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its target accuracy."""


class TailOverflowError(NumericalError):
    """Evaluation requested too deep in a tail for double precision."""


class DivergenceError(NumericalError):
    """The requested integral diverges for these parameters."""


class DatasetError(ValueError):
    """A dataset file could not be parsed into a valid sample."""
