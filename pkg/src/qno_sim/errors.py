"""Exception hierarchy shared by all modules."""


class QnoError(Exception):
    """Base class for errors raised by qno_sim."""


class DomainError(QnoError, ValueError):
    """A parameter lies outside the range where the real algebra is defined."""


class ContractError(QnoError, ValueError):
    """An input violates a documented precondition (norm, shape, symmetry)."""


class NumericalError(QnoError, ArithmeticError):
    """An iterative numerical method failed to reach its tolerance.

    ``achieved`` carries the best residual or error estimate reached.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class QuadratureError(NumericalError):
    """Panel-doubling quadrature did not converge."""


class EigenError(NumericalError):
    """The symmetric eigensolver exceeded its iteration cap."""
