"""Render publication-style figures from benchmark CSV artifacts.

Consumes only the documented CSV schemas (time traces, learning curves,
robustness tables, stability sweeps, curve samples); it has no dependency
on the package that produced them.
"""

__version__ = "0.1.0"

from .schemas import SCHEMAS, SchemaError, read_table  # noqa: F401
from .render import PlotJob, plot  # noqa: F401
