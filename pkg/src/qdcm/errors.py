"""Exception hierarchy shared by all qdcm modules."""


class QdcmError(Exception):
    """Base class for every error raised by this package."""


class UnknownPointError(QdcmError, KeyError):
    def __init__(self, point):
        super().__init__(point)
        self.point = point

    def __str__(self):
        return f"unknown point: {self.point!r}"


class ModelFormatError(QdcmError, ValueError):
    """A model, palette or image file could not be loaded."""


class FormulaSyntaxError(QdcmError, ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class InvalidPathError(QdcmError, ValueError):
    def __init__(self, step, message=None):
        super().__init__(message or f"invalid step at index {step}")
        self.step = step


class PathMismatchError(QdcmError, ValueError):
    """Two paths cannot be combined (direction or endpoint mismatch)."""


class NotSymmetricError(QdcmError, ValueError):
    pass


class BudgetExceeded(QdcmError, RuntimeError):
    pass


class PartitionError(QdcmError, ValueError):
    """A partition does not fit the model it is used with."""
