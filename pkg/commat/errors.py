"""Exceptions raised by commat.

Every class carries the exit code the command line reports for it, so the CLI
never needs its own mapping table.
"""


class CommatError(Exception):
    """Base class for all commat errors."""

    exit_code = 1


class UsageError(CommatError, ValueError):
    """An argument is outside the domain of the requested operation."""

    exit_code = 1


class MatrixShapeError(UsageError):
    """Two matrices disagree in dimension or modulus."""


class RefusalError(CommatError):
    """The request is well formed but will not be carried out."""

    exit_code = 2


class BudgetExceededError(RefusalError):
    """An enumeration would exceed the configured multiplication budget."""

    def __init__(self, operation: str, cost: int, budget: int):
        self.operation = operation
        self.cost = cost
        self.budget = budget
        super().__init__(
            f"{operation} needs about {cost:,} field multiplications, which exceeds the "
            f"budget of {budget:,}. Raise the budget with --budget or COMMAT_BUDGET, "
            "or choose a smaller field or dimension."
        )


class PrecisionError(RefusalError):
    """A value cannot be certified at the requested precision."""


class PoleProximityError(PrecisionError):
    """A product factor is too close to zero for certified division."""

    def __init__(self, ell: int, distance, threshold):
        self.ell = ell
        self.distance = distance
        self.threshold = threshold
        super().__init__(
            f"Factor ell={ell} lies within {float(distance):.3e} of a pole "
            f"(threshold {float(threshold):.3e}). Certification is impossible at this "
            "precision; move the evaluation point or lower --digits."
        )


class InconsistencyError(CommatError):
    """An internal identity failed, e.g. a count came out non-integral.

    This always indicates a bug, never bad input.
    """

    exit_code = 3
