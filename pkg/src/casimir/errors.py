"""Exception hierarchy.

The CLI maps these onto distinct exit codes, so keep input problems and
numerical failures in separate branches.
"""


class CasimirError(Exception):
    pass


class InputError(CasimirError, ValueError):
    """Bad arguments, table contents or file formats."""


class ExtrapolationError(InputError):
    """Extrapolation policy leads to a divergent tail integral."""


class NumericalError(CasimirError, ArithmeticError):
    pass


class ConvergenceError(NumericalError):
    """Iterative solver ran out of budget.

    ``best`` carries whatever the solver had when it gave up.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class TruncationError(NumericalError):
    """Matsubara tail estimate exceeds the requested tolerance."""
