"""Figure rendering for the delimited solver outputs.

Consumes only the documented CSV files written by the ``braggsolve`` CLI
(idd.csv, ld.csv, spot_<depth>cm.csv, metrics.csv, convergence.csv); no
solver internals are imported, so the two packages are coupled only
through the file formats.
"""

from .plots import KINDS, PlotSpec, VizError, render

__all__ = ["KINDS", "PlotSpec", "VizError", "render"]
