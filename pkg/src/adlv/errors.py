"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Unknown type label, malformed literal, or invalid job configuration."""


class BudgetError(RuntimeError):
    """A bounded search ran out of its node budget.

    ``partial`` carries whatever was computed before the budget ran out
    (for reductions, a replayable trace prefix).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class IntegrityError(RuntimeError):
    """An identity the algebra guarantees failed to hold; signals a bug."""
