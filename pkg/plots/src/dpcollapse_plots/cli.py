"""Command-line entry point: render one figure from CSV inputs.

Exit codes: 0 figure written, 2 bad inputs (missing file, wrong header,
empty CSV).
"""

import click

from .figures import (
    EXCLUDED_R0_M,
    FIGURE_KINDS,
    TAU_OBS_S,
    CsvFormatError,
    FigureSpec,
    render,
)

EXIT_OK = 0
EXIT_INPUT = 2


@click.group()
def main():
    """Figures from the dpcollapse CLI's CSV outputs."""


@main.command("render")
@click.option("--kind", required=True, type=click.Choice(FIGURE_KINDS),
              help="Figure kind.")
@click.option("--in", "inputs", required=True, multiple=True,
              type=click.Path(exists=True),
              help="Input CSV (repeatable for multi-trend figures).")
@click.option("--out", "output", required=True, type=click.Path(),
              help="Output image path.")
@click.option("--tau-obs", default=TAU_OBS_S, show_default=True,
              help="Reference observation time in seconds (tau_vs_r0).")
@click.option("--excluded-r0", default=EXCLUDED_R0_M, show_default=True,
              help="Upper edge of the excluded region in meters (tau_vs_r0).")
def render_cmd(kind, inputs, output, tau_obs, excluded_r0):
    """Render one figure from CSV inputs written by the dpcollapse CLI."""
    spec = FigureSpec(kind=kind, inputs=inputs, output=output,
                      tau_obs=tau_obs, excluded_r0=excluded_r0)
    try:
        render(spec)
    except CsvFormatError as exc:
        click.echo(f"input error: {exc}", err=True)
        raise SystemExit(EXIT_INPUT)
    click.echo(f"wrote {output}")
    raise SystemExit(EXIT_OK)
