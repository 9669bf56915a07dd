"""Batch command line: chromaticity tables, sorting runs, plot data, screens.

Exit codes: 0 success, 1 input error (unreadable or malformed data files),
2 config error (invalid screens, jobs or carousel layouts).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import configio
from .binning import validate_screen
from .cmf import Observer
from .colorimetry import ZeroTristimulus, chromaticity, luminous_value, tristimulus
from .ellipses import load_ellipses, macadam_1942_ellipses
from .linesim import (
    DEFAULT_BREAKEVEN_PARAMS,
    NeverBreaksEven,
    breakeven as compute_breakeven,
    run as run_simulation,
)
from .plotdata import build_plot_bundle, bundle_to_json

EXIT_INPUT_ERROR = 1
EXIT_CONFIG_ERROR = 2

_OBSERVER_CHOICE = click.Choice(list(Observer.__members__), case_sensitive=False)


def _observer(name: str) -> Observer:
    for member in Observer:
        if member.name.lower() == name.lower():
            return member
    raise click.BadParameter(name)


@click.group()
def main() -> None:
    """Colorimetry, bin screens and LED selection-line simulation."""


@main.command()
@click.argument("spd_files", nargs=-1, required=True, type=click.Path())
@click.option("--observer", default="CIE1931_2deg", type=_OBSERVER_CHOICE, show_default=True)
@click.option("--calibration", default=683.0, show_default=True, help="Lumens per unit Y.")
def chroma(spd_files: tuple[str, ...], observer: str, calibration: float) -> None:
    """Chromaticity and photometric value of SPD CSV files."""
    obs = _observer(observer)
    failed = False
    click.echo("file,x,y,lumens")
    for name in spd_files:
        try:
            spd = configio.read_spd_csv(name)
            t = tristimulus(spd, obs)
            xy = chromaticity(t)
            lum = luminous_value(t, calibration)
        except (configio.ParseError, ZeroTristimulus, OSError, ValueError) as exc:
            click.echo(f"{name}: {exc}", err=True)
            failed = True
            continue
        click.echo(f"{name},{xy.x!r},{xy.y!r},{lum!r}")
    if failed:
        sys.exit(EXIT_INPUT_ERROR)


@main.command()
@click.argument("job_file", type=click.Path())
@click.option("--out", default=None, type=click.Path(), help="Report directory (default: JOB.out).")
@click.option("--seed", default=None, type=int, help="Override the job's simulation seed.")
def sort(job_file: str, out: str | None, seed: int | None) -> None:
    """Run the selection-line simulation described by a job file."""
    job_path = Path(job_file)
    try:
        spec = configio.load_job(job_path)
        assembled = configio.assemble_job(spec, job_path.parent)
    except configio.ParseError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_INPUT_ERROR)
    except (configio.ValidationError, configio.ConfigError) as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    except OSError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_INPUT_ERROR)
    try:
        report = run_simulation(
            assembled.batch, assembled.cfg, seed if seed is not None else spec.seed
        )
    except configio.ConfigError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    out_dir = Path(out) if out is not None else job_path.with_suffix(".out")
    csv_path, summary_path = configio.write_report(report, out_dir, spec.name)
    click.echo(summary_path.read_text(), nl=False)
    click.echo(f"wrote {csv_path} and {summary_path}")


@main.command()
@click.option("--screen", "screen_file", default=None, type=click.Path(), help="Screen document to outline.")
@click.option(
    "--ellipses",
    "ellipse_source",
    default="none",
    show_default=True,
    help="'embedded', 'none' or a path to an ellipse table.",
)
@click.option("--report", "report_csv", default=None, type=click.Path(), help="report.csv of a finished run.")
@click.option("--observer", default="CIE1931_2deg", type=_OBSERVER_CHOICE, show_default=True)
@click.option("--out", required=True, type=click.Path(), help="Output JSON file.")
def plotdata(
    screen_file: str | None,
    ellipse_source: str,
    report_csv: str | None,
    observer: str,
    out: str,
) -> None:
    """Emit a deterministic plot bundle (locus, ellipses, bins, points)."""
    try:
        screen = configio.load_screen(screen_file) if screen_file else None
    except configio.ParseError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_INPUT_ERROR)
    except configio.ValidationError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    if ellipse_source == "embedded":
        ellipses = macadam_1942_ellipses()
    elif ellipse_source == "none":
        ellipses = ()
    else:
        try:
            ellipses = load_ellipses(ellipse_source)
        except (OSError, ValueError) as exc:
            click.echo(str(exc), err=True)
            sys.exit(EXIT_INPUT_ERROR)
    report = None
    if report_csv is not None:
        try:
            report = configio.read_report_csv(report_csv)
        except (configio.ParseError, OSError) as exc:
            click.echo(str(exc), err=True)
            sys.exit(EXIT_INPUT_ERROR)
    bundle = build_plot_bundle(screen, ellipses, report, _observer(observer))
    Path(out).write_text(bundle_to_json(bundle))
    click.echo(f"wrote {out}")


@main.group()
def screen() -> None:
    """Screen document tools."""


@screen.command("validate")
@click.argument("screen_file", type=click.Path())
def screen_validate(screen_file: str) -> None:
    """Check a screen document; prints one diagnostic per violation."""
    try:
        parsed = configio.load_screen(screen_file, validate=False)
    except configio.ParseError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_INPUT_ERROR)
    except OSError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_INPUT_ERROR)
    diags = validate_screen(parsed)
    if not diags:
        click.echo(f"{screen_file}: OK ({len(parsed.bins)} bins, "
                   f"{len(parsed.luminance_classes)} luminance classes)")
        return
    for d in diags:
        click.echo(f"{screen_file}: {d}", err=True)
    sys.exit(EXIT_CONFIG_ERROR)


@main.command("breakeven")
@click.option("--manual-rate", default=DEFAULT_BREAKEVEN_PARAMS["manual_rate"], show_default=True)
@click.option("--automated-rate", default=DEFAULT_BREAKEVEN_PARAMS["automated_rate"], show_default=True)
@click.option("--manual-cost", default=DEFAULT_BREAKEVEN_PARAMS["manual_cost_per_hour"], show_default=True)
@click.option("--automated-cost", default=DEFAULT_BREAKEVEN_PARAMS["automated_cost_per_hour"], show_default=True)
@click.option("--automated-fixed", default=DEFAULT_BREAKEVEN_PARAMS["automated_fixed_per_year"], show_default=True)
@click.option("--volume", default=None, type=float, help="Annual volume to get a recommendation for.")
def breakeven_cmd(
    manual_rate: float,
    automated_rate: float,
    manual_cost: float,
    automated_cost: float,
    automated_fixed: float,
    volume: float | None,
) -> None:
    """Annual volume where the automated line becomes the cheaper choice."""
    try:
        result = compute_breakeven(
            manual_rate, automated_rate, manual_cost, automated_cost, automated_fixed
        )
    except NeverBreaksEven as exc:
        click.echo(f"never breaks even: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    click.echo(f"threshold_per_year {result.threshold_per_year!r}")
    click.echo(f"manual_per_led {result.manual_per_led!r}")
    click.echo(f"automated_per_led {result.automated_per_led!r}")
    if volume is not None:
        click.echo(f"recommendation {result.recommend(volume).value}")


if __name__ == "__main__":
    main()
