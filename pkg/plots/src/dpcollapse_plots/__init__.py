"""Static figures from the collapse-engine CSV outputs.

This package never touches the physics library: it consumes the CSV files
written by the dpcollapse CLI (the fixed headers are replicated here as the
interface contract) and renders log-log matplotlib figures.
"""

from .figures import (
    BENCH_HEADER,
    EXCLUDED_R0_M,
    SWEEP_HEADER,
    TAU_OBS_S,
    CsvFormatError,
    FigureSpec,
    build_figure,
    read_rows,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "BENCH_HEADER",
    "EXCLUDED_R0_M",
    "SWEEP_HEADER",
    "TAU_OBS_S",
    "CsvFormatError",
    "FigureSpec",
    "build_figure",
    "read_rows",
    "render",
]
