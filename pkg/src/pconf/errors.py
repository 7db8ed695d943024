"""Exception types shared across the package."""


class PconfError(Exception):
    """Base class for all package errors."""


class DomainError(PconfError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ShapeError(PconfError, ValueError):
    """Array dimensions do not agree."""


class UnsupportedOperationError(PconfError, TypeError):
    pass


class NumericalError(PconfError, ArithmeticError):
    """A linear solve or evaluation failed numerically."""


class DivergenceError(NumericalError):
    def __init__(self, epoch, message=None):
        self.epoch = epoch
        super().__init__(
            message
            or f"non-finite objective or gradient at epoch {epoch}; try a smaller step size"
        )


class InputFormatError(PconfError, ValueError):
    """A data or configuration file is malformed."""
