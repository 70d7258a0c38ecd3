"""Shared exception types with CLI exit-code mapping."""


class DomainError(ValueError):
    """An argument is outside the domain an operation is defined on (exit 2)."""


class BudgetError(RuntimeError):
    """A work or node budget would be exceeded (exit 4)."""


class InvariantViolation(RuntimeError):
    """An internal cross-check failed; indicates a bug (exit 5)."""
