"""Figure regeneration for oamsat crosstalk CSV results."""

__version__ = "0.1.0"

from .figures import (
    FigureSpec,
    SchemaError,
    load_crosstalk_matrix,
    load_sweep_curves,
    plot_curves,
    plot_heatmap,
    plot_paired_curves,
    render,
)

__all__ = [
    "__version__",
    "FigureSpec",
    "SchemaError",
    "load_crosstalk_matrix",
    "load_sweep_curves",
    "plot_curves",
    "plot_heatmap",
    "plot_paired_curves",
    "render",
]
