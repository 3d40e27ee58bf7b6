"""Error taxonomy shared by the library and the CLI.

ValidationError maps to CLI exit code 1, NumericalError to exit code 2.
"""


class ValidationError(ValueError):
    """User input or precondition violated before any computation ran."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to reach its contracted accuracy/state."""


class ExpressionError(ValidationError):
    """Expression parse failure, carrying the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
