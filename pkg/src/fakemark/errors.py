"""Exception hierarchy shared by every fakemark module."""


class FakemarkError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FakemarkError, ValueError):
    """An argument lies outside the operation's domain."""


class CapacityError(DomainError):
    """Not enough room: too many users for the watermark length, no anchors left, ..."""


class ValidationError(FakemarkError, ValueError):
    """Persisted or constructed state violates an invariant."""


class TableParseError(ValidationError):
    """A delimited text file could not be read as a table."""

    def __init__(self, message: str, row_index: int | None = None):
        self.row_index = row_index
        if row_index is not None:
            message = f"row {row_index}: {message}"
        super().__init__(message)


class GenerationError(FakemarkError):
    """Fake tuples satisfying the uniqueness constraints could not be produced."""


class TransportError(FakemarkError):
    """The external generator service could not be reached."""


class FormatError(FakemarkError):
    """The external generator answered with an unusable payload."""

    def __init__(self, message: str, payload: str | bytes | None = None):
        self.payload = payload
        super().__init__(message)
