"""Exception hierarchy shared by all modules."""


class IAAError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(IAAError, ValueError):
    """Input data violates a structural or range constraint."""


class EmptyPanelError(ValidationError):
    """No intervals/records were supplied where at least one is required."""

    def __init__(self, message="empty panel"):
        super().__init__(message)


class DomainError(IAAError, ValueError):
    """A query falls outside the rating scale or an operation is undefined."""


class DegenerateSetError(DomainError):
    """A fuzzy set has zero area, so an integral ratio is undefined."""


class NotFoundError(IAAError, KeyError):
    """A requested factor, profession or condition label does not exist."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""
