"""Figure construction from the CSV contract.

Four figure kinds, all log-log:

* ``tau_vs_r0``: collapse time against the smearing length, with the
  observation-time reference line and the experimentally excluded region.
* ``bounds``: numerical energy gap sandwiched between the analytic
  lower and upper bounds over the effective smearing length.
* ``scaling``: energy gap against atom count, one trend per input CSV,
  with the fitted log-log slope in the legend.
* ``exec_time``: wall time against atom count per summation method.

No physics is recomputed here; every number is read from the CSVs and at
most rescaled for the axes.
"""

import csv
import math
from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be fixed first)

__all__ = [
    "SWEEP_HEADER",
    "BENCH_HEADER",
    "TAU_OBS_S",
    "EXCLUDED_R0_M",
    "FIGURE_KINDS",
    "CsvFormatError",
    "FigureSpec",
    "read_rows",
    "build_figure",
    "render",
]

# The fixed headers written by the dpcollapse CLI.  They are replicated
# here verbatim as the interface contract; this package has no import
# dependency on the engine.
SWEEP_HEADER = [
    "r0_m", "r_eff_m", "n_atoms", "d_m", "delta_e_J", "tau_s",
    "tau_obs_ratio", "bound_lower_J", "bound_upper_J", "wall_ms", "term_count",
]

BENCH_HEADER = ["n_atoms", "method", "wall_ms", "term_count"]

# Default overlays: the observation time and the smearing length below
# which experiments already exclude the model.
TAU_OBS_S = 0.01
EXCLUDED_R0_M = 4e-10

FIGURE_KINDS = ("tau_vs_r0", "bounds", "scaling", "exec_time")

# Fixed save parameters so a given input always produces identical bytes.
_SAVE_KWARGS = {"dpi": 120, "metadata": {"Software": "dpcollapse-plots"}}


class CsvFormatError(ValueError):
    """A CSV input that does not satisfy the header contract."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: kind, input CSVs, output path and overlays."""

    kind: str
    inputs: tuple
    output: str
    tau_obs: float = TAU_OBS_S
    excluded_r0: float = EXCLUDED_R0_M

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; expected one of {FIGURE_KINDS}"
            )
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        object.__setattr__(self, "inputs", tuple(self.inputs))


def _cell(text):
    """Decode one CSV cell: empty -> None, numeric -> float, else verbatim
    (the benchmark CSV's method column is a plain label)."""
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        return text


def read_rows(path, expected_header):
    """Read one CSV under the fixed header contract.

    Returns a list of dicts with float values (empty cells become None).
    Raises CsvFormatError for an empty file, a header that does not match
    the contract, or a header with no data rows after it.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty CSV, nothing to plot") from None
        missing = [col for col in expected_header if col not in header]
        if missing:
            raise CsvFormatError(
                f"{path}: missing columns {missing}; expected header "
                f"{expected_header}, got {header}"
            )
        rows = []
        for raw in reader:
            rows.append({
                col: _cell(cell) for col, cell in zip(header, raw)
            })
    if not rows:
        raise CsvFormatError(f"{path}: header only, no data rows to plot")
    return rows


def _finite_pairs(rows, xcol, ycol):
    pts = [
        (r[xcol], r[ycol])
        for r in rows
        if r.get(xcol) is not None and r.get(ycol) is not None
    ]
    if not pts:
        raise CsvFormatError(
            f"no rows with both {xcol!r} and {ycol!r} populated"
        )
    return np.array(pts).T


def _loglog_slope(x, y):
    return float(np.polyfit(np.log10(x), np.log10(y), 1)[0])


def _build_tau_vs_r0(spec):
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for path in spec.inputs:
        rows = read_rows(path, SWEEP_HEADER)
        r0, tau = _finite_pairs(rows, "r0_m", "tau_s")
        ax.loglog(r0, tau, marker="o", ms=3.5, label=f"N = {int(rows[0]['n_atoms'])}")
    ax.axhline(spec.tau_obs, color="red", linestyle="--",
               label=rf"$\tau_{{obs}}$ = {spec.tau_obs:g} s")
    lo, _ = ax.get_xlim()
    ax.axvspan(min(lo, spec.excluded_r0 / 10.0), spec.excluded_r0,
               color="0.8", zorder=0, label="excluded")
    ax.set_xlabel(r"$R_0$ (m)")
    ax.set_ylabel(r"$\tau$ (s)")
    ax.set_title("Collapse time vs smearing length")
    ax.legend(fontsize=8)
    return fig


def _build_bounds(spec):
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for path in spec.inputs:
        rows = read_rows(path, SWEEP_HEADER)
        r, lower = _finite_pairs(rows, "r_eff_m", "bound_lower_J")
        _, upper = _finite_pairs(rows, "r_eff_m", "bound_upper_J")
        ax.loglog(r, upper, color="tab:blue", label="upper bound")
        ax.loglog(r, lower, color="tab:orange", label="lower bound")
        has_numerics = any(row.get("delta_e_J") is not None for row in rows)
        if has_numerics:
            rn, de = _finite_pairs(rows, "r_eff_m", "delta_e_J")
            ax.loglog(rn, de, "k.", ms=4, label="numerics")
    ax.set_xlabel(r"$R_{eff}$ (m)")
    ax.set_ylabel(r"$\Delta E$ (J)")
    ax.set_title("Analytic bound sandwich")
    ax.legend(fontsize=8)
    return fig


def _build_scaling(spec):
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for path in spec.inputs:
        rows = read_rows(path, SWEEP_HEADER)
        n, de = _finite_pairs(rows, "n_atoms", "delta_e_J")
        slope = _loglog_slope(n, de)
        ax.loglog(n, de, marker="s", ms=4,
                  label=f"{path.rsplit('/', 1)[-1]} (slope {slope:.2f})")
    ax.set_xlabel(r"$N$ (atoms)")
    ax.set_ylabel(r"$\Delta E$ (J)")
    ax.set_title("Energy gap vs atom count")
    ax.legend(fontsize=8)
    return fig


def _build_exec_time(spec):
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for path in spec.inputs:
        rows = read_rows(path, BENCH_HEADER)
        methods = []
        for row in rows:
            if row["method"] not in methods:
                methods.append(row["method"])
        for method in methods:
            sel = [r for r in rows if r["method"] == method]
            n, wall = _finite_pairs(sel, "n_atoms", "wall_ms")
            slope = _loglog_slope(n, wall) if len(n) >= 2 else math.nan
            ax.loglog(n, wall, marker="o", ms=4,
                      label=f"{method} (slope {slope:.2f})")
    ax.set_xlabel(r"$N$ (atoms)")
    ax.set_ylabel("wall time (ms)")
    ax.set_title("Summation wall time vs atom count")
    ax.legend(fontsize=8)
    return fig


_BUILDERS = {
    "tau_vs_r0": _build_tau_vs_r0,
    "bounds": _build_bounds,
    "scaling": _build_scaling,
    "exec_time": _build_exec_time,
}

# exec_time reads the benchmark CSV; everything else reads sweep-shaped CSVs
_EXPECTED = {kind: SWEEP_HEADER for kind in FIGURE_KINDS}
_EXPECTED["exec_time"] = BENCH_HEADER


def build_figure(spec):
    """Build the matplotlib Figure for a spec without saving it.

    Raises CsvFormatError before any drawing if an input is empty or
    misses contract columns, so a bad CSV never yields an empty figure.
    """
    for path in spec.inputs:
        read_rows(path, _EXPECTED[spec.kind])
    return _BUILDERS[spec.kind](spec)


def render(spec):
    """Render a FigureSpec to its output path and return that path."""
    fig = build_figure(spec)
    try:
        fig.savefig(spec.output, **_SAVE_KWARGS)
    finally:
        plt.close(fig)
    return spec.output
