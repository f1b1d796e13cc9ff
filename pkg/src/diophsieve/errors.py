"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: validation-type errors exit 1,
capacity/budget errors exit 2.
"""


class DiophSieveError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DiophSieveError, ValueError):
    """An argument lies outside the domain where a formula is defined."""

    def __init__(self, message, argument=None):
        super().__init__(message)
        self.argument = argument


class CapacityError(DiophSieveError):
    """A size cap was exceeded (sieve limit, factorization size, ...)."""


class BudgetExceededError(DiophSieveError):
    """Adaptive quadrature ran out of its evaluation budget.

    ``partial`` carries the best estimate reached before giving up.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PrecisionError(DiophSieveError, ArithmeticError):
    """A floor/rounding decision could not be resolved at available precision."""


class EmptyFeasibleSetError(DiophSieveError):
    """No grid point is admissible even at the smallest searched rho."""


class NoSuitableConvergentError(DiophSieveError):
    """No continued-fraction denominator falls in the requested window."""


class ConfigError(DiophSieveError, ValueError):
    """Malformed or inconsistent run configuration."""
