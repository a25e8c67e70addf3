"""Run-time knobs: evaluation budgets and worker counts.

The big enumeration budget guards every O(X*Y)-style loop. It defaults to
10**10 points and can be overridden globally with the BINFORM_BUDGET
environment variable or per call via the `budget=` keyword.
"""

from __future__ import annotations

import os

DEFAULT_EVAL_BUDGET = 10**10
DEFAULT_CELL_BUDGET = 10**8

from .errors import BudgetExceededError


def eval_budget(explicit: int | None = None) -> int:
    """Effective evaluation budget: explicit arg > env var > default."""
    if explicit is not None:
        return int(explicit)
    env = os.environ.get("BINFORM_BUDGET")
    if env:
        return int(env)
    return DEFAULT_EVAL_BUDGET


def check_budget(needed: int, budget: int | None = None, what: str = "evaluations") -> int:
    """Raise BudgetExceededError if `needed` exceeds the effective budget."""
    limit = eval_budget(budget)
    if needed > limit:
        raise BudgetExceededError(needed, limit, what)
    return needed
