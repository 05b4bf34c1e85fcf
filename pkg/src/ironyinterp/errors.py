class IronyInterpError(Exception):
    """Base class for input errors raised by this package."""


class FormatError(IronyInterpError):
    """A file could not be parsed under its declared format."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += str(path)
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


class DuplicateIdError(FormatError):
    pass


class TreeError(FormatError):
    """A dependency tree violates the forest invariant."""


class InvariantError(RuntimeError):
    """An internal invariant was violated (a bug, not bad input)."""
