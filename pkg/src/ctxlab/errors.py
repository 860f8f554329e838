"""Exception types shared across the package."""


class ToolError(Exception):
    """Base class for all errors raised by ctxlab operations."""


class InputError(ToolError):
    """Malformed input: wrong shapes, unreadable files, bad parameters."""


class DomainError(ToolError):
    """Structurally valid input outside an operation's domain."""


class MixedObservableError(DomainError):
    """Correlation requested between a carrier function and a matrix observable."""


class CapExceeded(ToolError):
    """A configured size cap would be exceeded; carries a size report."""

    def __init__(self, message: str, size: int, cap: int):
        super().__init__(f"{message} (size {size} exceeds cap {cap})")
        self.size = size
        self.cap = cap
