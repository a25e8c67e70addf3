"""Shared exception types."""


class BinformError(Exception):
    """Base class for package errors."""


class BudgetExceededError(BinformError):
    """An enumeration would exceed its evaluation/cell budget."""

    def __init__(self, needed: int, budget: int, what: str = "evaluations"):
        self.needed = needed
        self.budget = budget
        super().__init__(f"{what}: need {needed}, budget {budget}")


class PrecisionExhaustedError(BinformError):
    """Remaining precision cannot certify the next result digit/quotient."""


class DegenerateFormError(BinformError):
    """A form violates a structural precondition (degree, coefficient count)."""


class DomainError(BinformError, ValueError):
    """Arguments outside a function's mathematical domain."""


class LiftRangeError(BinformError):
    """A lifted point falls outside the original search box."""


class InsufficientRowsError(BinformError):
    """Not enough usable rows to fit a trend."""
