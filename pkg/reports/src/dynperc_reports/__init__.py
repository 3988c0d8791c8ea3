"""Figures and summary reports over dynperc CSV/manifest outputs."""

from .errors import EmptyInputError, ReportError, SchemaError
from .figures import KINDS, STYLE_VERSION, FigureSpec, render
from .report import summarize
from .schemas import (
    ESTIMATES_HEADER,
    PAIRINGS_HEADER,
    EstimateRow,
    find_manifest,
    load_manifest,
    read_estimates,
    read_pairings,
)

__version__ = "0.1.0"

__all__ = [
    "EmptyInputError",
    "ReportError",
    "SchemaError",
    "KINDS",
    "STYLE_VERSION",
    "FigureSpec",
    "render",
    "summarize",
    "ESTIMATES_HEADER",
    "PAIRINGS_HEADER",
    "EstimateRow",
    "find_manifest",
    "load_manifest",
    "read_estimates",
    "read_pairings",
    "__version__",
]
