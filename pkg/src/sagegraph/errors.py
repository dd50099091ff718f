"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A parameter is outside its permitted range or flags contradict each other."""


class GraphFormatError(ValueError):
    """An input file could not be parsed.

    ``line`` carries the 1-based line number for text input, or ``None``.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GraphValidationError(ValueError):
    """A parsed graph violates a structural invariant (e.g. a negative weight)."""
