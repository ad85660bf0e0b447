"""Figure rendering for gaussdkw CSV outputs.

Pure views of the CSV tables written by the primary package: nothing is
recomputed here, every plotted curve is a column of the input file (plus,
for scaling figures, the fitted line taken from the run's summary JSON).
"""

from gaussdkw_plots.render import FigureSpec, render

__version__ = "0.1.0"

__all__ = ["FigureSpec", "render", "__version__"]
