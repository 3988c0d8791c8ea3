"""Errors raised while reading experiment files or rendering."""


class ReportError(Exception):
    pass


class SchemaError(ReportError):
    """An input file does not match the documented CSV/manifest schema."""

    def __init__(self, path, detail: str):
        self.path = str(path)
        self.detail = detail
        super().__init__(f"{self.path}: {detail}")


class EmptyInputError(ReportError):
    """A data file has a valid header but no rows to plot."""
