"""Exception types shared across the package."""

import numpy as np


class NotPositiveDefinite(np.linalg.LinAlgError):
    """Raised when a matrix that must be SPD has min eigenvalue <= eps_psd."""


class ParseError(ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}, column {column or 1})"
        super().__init__(message + where)


class ValidationError(ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
