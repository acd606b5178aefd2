"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class NumericalFailure(RuntimeError):
    """An iterative routine failed to converge."""


class BudgetExceeded(RuntimeError):
    """A sampling request would exceed the configured draw budget."""

    def __init__(self, requested, budget):
        self.requested = requested
        self.budget = budget
        super().__init__(
            f"request needs {requested:.3g} gamma draws, budget is {budget:.3g}"
        )
