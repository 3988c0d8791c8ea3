"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A parameter is outside its documented domain."""


class SchemaError(ValueError):
    """A config document failed validation; message names the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ResourceLimitError(RuntimeError):
    """A run would exceed a configured resource cap; message names the parameter."""


class InsufficientDataError(ValueError):
    """Too few samples for the requested statistic."""


class SupercriticalityError(RuntimeError):
    """An estimator that assumes a giant component found none."""


class BisectionError(RuntimeError):
    """Bisection failed; carries the evaluation trace for diagnosis."""

    def __init__(self, message: str, trace=None):
        self.trace = list(trace) if trace is not None else []
        super().__init__(message)
