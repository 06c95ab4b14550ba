"""Shared structured errors."""

from __future__ import annotations


class BudgetExceededError(RuntimeError):
    """A construction would exceed the configured size budget."""

    def __init__(self, what, size, budget):
        self.what = what
        self.size = size
        self.budget = budget
        super().__init__(f"{what}: size {size} exceeds budget {budget}")
