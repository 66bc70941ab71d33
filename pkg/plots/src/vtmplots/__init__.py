"""Batch renderer turning simulator experiment CSVs into PNG charts.

Consumes only the CSV files the `simulate` CLI writes (metadata preamble,
header, rows); no coupling to the simulator's internals.
"""

__version__ = "0.1.0"

from .csvdata import CsvTable, read_table
from .render import render
from .specs import FIGURE_SPECS, FigureSpec, spec_for

__all__ = ["CsvTable", "read_table", "render", "FigureSpec", "FIGURE_SPECS", "spec_for"]
