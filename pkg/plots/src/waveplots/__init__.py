"""Figure rendering for staticwave simulation outputs.

Consumes only the CSV tables and meta.json a run writes; no physics is
recomputed here.
"""

__version__ = "0.1.0"

from .figures import FIGURE_KINDS, PlotRequest, RenderResult, render  # noqa: F401
from .readers import RunData, SchemaError, load_run  # noqa: F401
