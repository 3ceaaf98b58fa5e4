"""Chart regeneration for spirap harness CSV output."""

from .reader import ResultTable, SchemaError, read_results
from .render import STYLES, PlotSpec, render

__version__ = "0.1.0"
