"""Operator-facing file formats.

Everything the operator edits is a small line-based text document: words
separated by whitespace, ``#`` starts a comment, indented lines continue the
preceding ``bin`` stanza. The same family covers screens, LED lots and job
descriptions; SPD interchange uses two-column CSV with one header line.
Writers are deterministic so identical inputs produce identical bytes.

Screen document::

    screen fine-white
    observer CIE1931_2deg
    bin R0C0
      0.28 0.28
      0.29 0.28
      0.29 0.29
      0.28 0.29
    lumclass ALL 0 inf

Lot document::

    lot blue-470
    peak_nm 470.0
    fwhm_nm 22.0
    peak_power 1.0
    sigma_peak_nm 1.5
    sigma_fwhm_nm 0.8
    sigma_power 0.05
    count 100
    seed 42

Job document::

    job demo
    mode Automated
    lot blue-470.lot
    screen fine-white.screen
    seed 7
    speed 0
    compartment 0 R0C0 unlimited
    compartment 1 REJECT unlimited
    timing pick fixed 3.0

``screen`` may be omitted when a supervising service supplies the active
screen; ``compartment`` rows may be omitted to get one unlimited compartment
per bin plus REJECT; ``timing`` rows override single phases of the mode's
default table; ``speed 0`` means run as fast as possible.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .binning import (
    Bin,
    BinScreen,
    Diagnostic,
    LuminanceClass,
    validate_screen,
)
from .cmf import Observer
from .colorimetry import ChromaticityXY
from .instrument import LedModel, LedSample, LotVariation, make_batch
from .linesim import (
    Carousel,
    Compartment,
    ConfigError,
    Duration,
    Fixed,
    Mode,
    ModeConfig,
    Normal,
    PHASES,
    SortReport,
    StationTimings,
    Uniform,
    automated_config,
    manual_config,
)
from .spectra import SpectralPowerDistribution


class ParseError(ValueError):
    """Malformed document, with file and line context."""

    def __init__(self, source: str, line_no: int | None, message: str):
        self.source = source
        self.line_no = line_no
        where = source if line_no is None else f"{source}:{line_no}"
        super().__init__(f"{where}: {message}")


class ValidationError(ValueError):
    """Structurally parsable but semantically invalid document."""

    def __init__(self, source: str, diagnostics: list[Diagnostic]):
        self.source = source
        self.diagnostics = list(diagnostics)
        super().__init__(
            f"{source}: " + "; ".join(str(d) for d in diagnostics)
        )


def _fmt(value: float) -> str:
    if value == math.inf:
        return "inf"
    return repr(float(value))


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        yield i, stripped


def _float(token: str, source: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(source, line_no, f"expected a number, got {token!r}") from None


def _int(token: str, source: str, line_no: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(source, line_no, f"expected an integer, got {token!r}") from None


# ---------------------------------------------------------------------------
# Screens


def parse_screen(text: str, source: str = "<screen>") -> BinScreen:
    """Parse a screen document; raises ParseError on malformed input.

    Semantic screen invariants are *not* enforced here; run
    :func:`ledsort.binning.validate_screen` (or :func:`load_screen`) to get
    diagnostics.
    """
    name = "screen"
    observer = Observer.CIE1931_2deg
    bins: list[Bin] = []
    classes: list[LuminanceClass] = []
    current_bin: tuple[int, str, list[ChromaticityXY]] | None = None

    def flush_bin() -> None:
        nonlocal current_bin
        if current_bin is None:
            return
        line_no, bin_id, verts = current_bin
        if len(verts) < 3:
            raise ParseError(source, line_no, f"bin {bin_id!r} needs at least 3 vertices")
        bins.append(Bin(bin_id, tuple(verts)))
        current_bin = None

    for line_no, line in _lines(text):
        indented = line[0] in " \t"
        tokens = line.split()
        if indented:
            if current_bin is None:
                raise ParseError(source, line_no, "vertex line outside a bin stanza")
            if len(tokens) != 2:
                raise ParseError(source, line_no, "vertex lines are 'x y'")
            x = _float(tokens[0], source, line_no)
            y = _float(tokens[1], source, line_no)
            try:
                current_bin[2].append(ChromaticityXY(x, y))
            except ValueError as exc:
                raise ParseError(source, line_no, str(exc)) from None
            continue
        flush_bin()
        keyword = tokens[0]
        if keyword == "screen":
            if len(tokens) != 2:
                raise ParseError(source, line_no, "usage: screen NAME")
            name = tokens[1]
        elif keyword == "observer":
            if len(tokens) != 2 or tokens[1] not in Observer.__members__:
                options = ", ".join(Observer.__members__)
                raise ParseError(source, line_no, f"observer must be one of: {options}")
            observer = Observer[tokens[1]]
        elif keyword == "bin":
            if len(tokens) != 2:
                raise ParseError(source, line_no, "usage: bin ID")
            current_bin = (line_no, tokens[1], [])
        elif keyword == "lumclass":
            if len(tokens) != 4:
                raise ParseError(source, line_no, "usage: lumclass LABEL MIN MAX")
            lo = _float(tokens[2], source, line_no)
            hi = math.inf if tokens[3] == "inf" else _float(tokens[3], source, line_no)
            try:
                classes.append(LuminanceClass(tokens[1], lo, hi))
            except ValueError as exc:
                raise ParseError(source, line_no, str(exc)) from None
        else:
            raise ParseError(source, line_no, f"unknown keyword {keyword!r}")
    flush_bin()
    if not bins:
        raise ParseError(source, None, "screen defines no bins")
    if not classes:
        classes = [LuminanceClass("ALL", 0.0, math.inf)]
    return BinScreen(tuple(bins), tuple(classes), name=name, observer=observer)


def format_screen(screen: BinScreen) -> str:
    out = [f"screen {screen.name}", f"observer {screen.observer.name}"]
    for b in screen.bins:
        out.append(f"bin {b.id}")
        for v in b.polygon:
            out.append(f"  {_fmt(v.x)} {_fmt(v.y)}")
    for c in screen.luminance_classes:
        out.append(f"lumclass {c.label} {_fmt(c.min_lumens)} {_fmt(c.max_lumens)}")
    return "\n".join(out) + "\n"


def load_screen(path: str | Path, validate: bool = True) -> BinScreen:
    """Read and (by default) validate a screen file."""
    path = Path(path)
    screen = parse_screen(path.read_text(), str(path))
    if validate:
        diags = validate_screen(screen)
        if diags:
            raise ValidationError(str(path), diags)
    return screen


def save_screen(screen: BinScreen, path: str | Path) -> None:
    Path(path).write_text(format_screen(screen))


# ---------------------------------------------------------------------------
# LED lots


@dataclass(frozen=True)
class LotSpec:
    name: str
    model: LedModel
    count: int
    seed: int


def parse_lot(text: str, source: str = "<lot>") -> LotSpec:
    fields: dict[str, float] = {}
    name = "lot"
    for line_no, line in _lines(text):
        tokens = line.split()
        if tokens[0] == "lot":
            if len(tokens) != 2:
                raise ParseError(source, line_no, "usage: lot NAME")
            name = tokens[1]
            continue
        if len(tokens) != 2:
            raise ParseError(source, line_no, "lot entries are 'key value'")
        key = tokens[0]
        known = {
            "peak_nm", "fwhm_nm", "peak_power",
            "sigma_peak_nm", "sigma_fwhm_nm", "sigma_power",
            "count", "seed",
        }
        if key not in known:
            raise ParseError(source, line_no, f"unknown lot key {key!r}")
        fields[key] = _float(tokens[1], source, line_no)
    for required in ("peak_nm", "fwhm_nm", "count"):
        if required not in fields:
            raise ParseError(source, None, f"lot is missing {required!r}")
    try:
        model = LedModel(
            peak_wavelength_nm=fields["peak_nm"],
            fwhm_nm=fields["fwhm_nm"],
            peak_power=fields.get("peak_power", 1.0),
            variation=LotVariation(
                peak_nm=fields.get("sigma_peak_nm", 0.0),
                fwhm_nm=fields.get("sigma_fwhm_nm", 0.0),
                power=fields.get("sigma_power", 0.0),
            ),
        )
    except ValueError as exc:
        raise ParseError(source, None, str(exc)) from None
    return LotSpec(name, model, int(fields["count"]), int(fields.get("seed", 0)))


def format_lot(lot: LotSpec) -> str:
    m, v = lot.model, lot.model.variation
    return "\n".join(
        [
            f"lot {lot.name}",
            f"peak_nm {_fmt(m.peak_wavelength_nm)}",
            f"fwhm_nm {_fmt(m.fwhm_nm)}",
            f"peak_power {_fmt(m.peak_power)}",
            f"sigma_peak_nm {_fmt(v.peak_nm)}",
            f"sigma_fwhm_nm {_fmt(v.fwhm_nm)}",
            f"sigma_power {_fmt(v.power)}",
            f"count {lot.count}",
            f"seed {lot.seed}",
        ]
    ) + "\n"


def load_lot(path: str | Path) -> LotSpec:
    path = Path(path)
    return parse_lot(path.read_text(), str(path))


def save_lot(lot: LotSpec, path: str | Path) -> None:
    Path(path).write_text(format_lot(lot))


def lot_batch(lot: LotSpec, observer: Observer = Observer.CIE1931_2deg) -> list[LedSample]:
    """Materialize the lot's LEDs from its own seed."""
    rng = np.random.default_rng(lot.seed)
    return make_batch(lot.model, lot.count, rng, prefix=lot.name, observer=observer)


# ---------------------------------------------------------------------------
# Jobs


@dataclass(frozen=True)
class JobSpec:
    name: str
    mode: Mode
    lot_ref: str
    screen_ref: str | None
    seed: int
    speed: float
    compartments: tuple[Compartment, ...] | None
    timing_overrides: tuple[tuple[str, Duration], ...]


def _parse_duration(tokens: list[str], source: str, line_no: int) -> Duration:
    kind = tokens[0]
    args = [_float(t, source, line_no) for t in tokens[1:]]
    try:
        if kind == "fixed" and len(args) == 1:
            return Fixed(args[0])
        if kind == "uniform" and len(args) == 2:
            return Uniform(args[0], args[1])
        if kind == "normal" and len(args) == 2:
            return Normal(args[0], args[1])
    except ValueError as exc:
        raise ParseError(source, line_no, str(exc)) from None
    raise ParseError(source, line_no, "timing is 'fixed S' | 'uniform LO HI' | 'normal MEAN SIGMA'")


def parse_job(text: str, source: str = "<job>") -> JobSpec:
    name = "job"
    mode: Mode | None = None
    lot_ref: str | None = None
    screen_ref: str | None = None
    seed = 0
    speed = 0.0
    compartments: list[Compartment] = []
    overrides: list[tuple[str, Duration]] = []
    for line_no, line in _lines(text):
        tokens = line.split()
        keyword = tokens[0]
        if keyword == "job" and len(tokens) == 2:
            name = tokens[1]
        elif keyword == "mode" and len(tokens) == 2:
            if tokens[1] not in Mode.__members__:
                raise ParseError(source, line_no, "mode must be Manual or Automated")
            mode = Mode[tokens[1]]
        elif keyword == "lot" and len(tokens) == 2:
            lot_ref = tokens[1]
        elif keyword == "screen" and len(tokens) == 2:
            screen_ref = tokens[1]
        elif keyword == "seed" and len(tokens) == 2:
            seed = _int(tokens[1], source, line_no)
        elif keyword == "speed" and len(tokens) == 2:
            speed = _float(tokens[1], source, line_no)
        elif keyword == "compartment" and len(tokens) in (3, 4):
            index = _int(tokens[1], source, line_no)
            cap: int | None = None
            if len(tokens) == 4 and tokens[3] != "unlimited":
                cap = _int(tokens[3], source, line_no)
            compartments.append(Compartment(index, tokens[2], cap))
        elif keyword == "timing" and len(tokens) >= 3:
            phase = tokens[1]
            if phase not in PHASES:
                raise ParseError(source, line_no, f"unknown phase {phase!r}")
            overrides.append((phase, _parse_duration(tokens[2:], source, line_no)))
        else:
            raise ParseError(source, line_no, f"cannot parse job line {line!r}")
    if mode is None:
        raise ParseError(source, None, "job is missing 'mode'")
    if lot_ref is None:
        raise ParseError(source, None, "job is missing 'lot'")
    if speed < 0:
        raise ParseError(source, None, "speed cannot be negative")
    return JobSpec(
        name=name,
        mode=mode,
        lot_ref=lot_ref,
        screen_ref=screen_ref,
        seed=seed,
        speed=speed,
        compartments=tuple(compartments) if compartments else None,
        timing_overrides=tuple(overrides),
    )


def format_job(spec: JobSpec) -> str:
    out = [f"job {spec.name}", f"mode {spec.mode.name}", f"lot {spec.lot_ref}"]
    if spec.screen_ref is not None:
        out.append(f"screen {spec.screen_ref}")
    out.append(f"seed {spec.seed}")
    out.append(f"speed {_fmt(spec.speed)}")
    if spec.compartments is not None:
        for c in spec.compartments:
            cap = "unlimited" if c.capacity is None else str(c.capacity)
            out.append(f"compartment {c.index} {c.target} {cap}")
    for phase, dur in spec.timing_overrides:
        if isinstance(dur, Fixed):
            out.append(f"timing {phase} fixed {_fmt(dur.seconds)}")
        elif isinstance(dur, Uniform):
            out.append(f"timing {phase} uniform {_fmt(dur.low)} {_fmt(dur.high)}")
        else:
            out.append(f"timing {phase} normal {_fmt(dur.mean_s)} {_fmt(dur.sigma_s)}")
    return "\n".join(out) + "\n"


def load_job(path: str | Path) -> JobSpec:
    path = Path(path)
    return parse_job(path.read_text(), str(path))


def save_job(spec: JobSpec, path: str | Path) -> None:
    Path(path).write_text(format_job(spec))


@dataclass(frozen=True)
class AssembledJob:
    spec: JobSpec
    batch: list[LedSample]
    cfg: ModeConfig
    lot: LotSpec


def assemble_job(
    spec: JobSpec,
    base_dir: str | Path = ".",
    screen: BinScreen | None = None,
) -> AssembledJob:
    """Resolve references and build the runnable (batch, config) pair.

    ``screen`` overrides the document's screen reference; a document without a
    screen reference requires one (the service's active screen).
    """
    base = Path(base_dir)
    lot = load_lot(base / spec.lot_ref)
    if screen is None:
        if spec.screen_ref is None:
            raise ConfigError(f"job {spec.name!r} references no screen and none was supplied")
        screen = load_screen(base / spec.screen_ref)
    if spec.mode is Mode.Automated:
        cfg = automated_config(screen)
    else:
        cfg = manual_config(screen)
    if spec.timing_overrides:
        cfg = dataclasses.replace(
            cfg, timings=dataclasses.replace(cfg.timings, **dict(spec.timing_overrides))
        )
    if spec.compartments is not None:
        cfg = dataclasses.replace(cfg, carousel=Carousel(spec.compartments))
    batch = lot_batch(lot, cfg.observer)
    return AssembledJob(spec=spec, batch=batch, cfg=cfg, lot=lot)


# ---------------------------------------------------------------------------
# SPD CSV interchange


SPD_CSV_HEADER = ("wavelength_nm", "power")


def read_spd_csv(path: str | Path) -> SpectralPowerDistribution:
    """Two-column CSV with one header line; decimal separator is '.'."""
    path = Path(path)
    rows: list[tuple[float, float]] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError(str(path), 1, "empty file")
        if [h.strip() for h in header[:2]] != list(SPD_CSV_HEADER):
            raise ParseError(str(path), 1, f"header must be {','.join(SPD_CSV_HEADER)}")
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise ParseError(str(path), line_no, "rows are 'wavelength_nm,power'")
            rows.append(
                (_float(row[0], str(path), line_no), _float(row[1], str(path), line_no))
            )
    try:
        return SpectralPowerDistribution.from_pairs(rows)
    except ValueError as exc:
        raise ParseError(str(path), None, str(exc)) from None


def write_spd_csv(spd: SpectralPowerDistribution, path: str | Path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SPD_CSV_HEADER)
    for wl, p in zip(spd.wavelengths_nm, spd.power):
        writer.writerow([_fmt(float(wl)), _fmt(float(p))])
    Path(path).write_text(buf.getvalue())


# ---------------------------------------------------------------------------
# Reports


REPORT_CSV_HEADER = (
    "led_id", "x", "y", "lumens", "chroma_bin", "lum_class",
    "destination", "compartment", "overflowed", "cycle_time_s",
)


def format_report_csv(report: SortReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_CSV_HEADER)
    for r in report.records:
        writer.writerow(
            [
                r.led_id,
                _fmt(r.x),
                _fmt(r.y),
                _fmt(r.lumens),
                r.assignment.chroma_bin,
                r.assignment.lum_class,
                r.destination,
                "" if r.compartment is None else str(r.compartment),
                "true" if r.overflowed else "false",
                _fmt(r.cycle_time_s),
            ]
        )
    return buf.getvalue()


def format_report_summary(report: SortReport, job_name: str = "job") -> str:
    out = [
        f"job {job_name}",
        f"count {report.count}",
        f"simulated_seconds {_fmt(report.simulated_seconds)}",
        f"leds_per_hour {_fmt(report.leds_per_hour)}",
        f"rejects {report.rejects}",
        f"overflows {report.overflows}",
    ]
    for bin_id, n in report.compartment_counts.items():
        out.append(f"compartment {bin_id} {n}")
    return "\n".join(out) + "\n"


def write_report(
    report: SortReport, out_dir: str | Path, job_name: str = "job"
) -> tuple[Path, Path]:
    """Write per-LED CSV and the summary document; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "report.csv"
    summary_path = out / "summary.txt"
    csv_path.write_text(format_report_csv(report))
    summary_path.write_text(format_report_summary(report, job_name))
    return csv_path, summary_path


def read_report_csv(path: str | Path) -> SortReport:
    """Rebuild a SortReport from its per-LED CSV (aggregates are recomputed)."""
    from .binning import BinAssignment
    from .linesim import LedRecord

    path = Path(path)
    records: list[LedRecord] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != REPORT_CSV_HEADER:
            raise ParseError(str(path), 1, f"header must be {','.join(REPORT_CSV_HEADER)}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(REPORT_CSV_HEADER):
                raise ParseError(str(path), line_no, "wrong column count")
            records.append(
                LedRecord(
                    led_id=row[0],
                    x=_float(row[1], str(path), line_no),
                    y=_float(row[2], str(path), line_no),
                    lumens=_float(row[3], str(path), line_no),
                    assignment=BinAssignment(row[4], row[5]),
                    destination=row[6],
                    compartment=None if row[7] == "" else _int(row[7], str(path), line_no),
                    overflowed=row[8] == "true",
                    cycle_time_s=_float(row[9], str(path), line_no),
                )
            )
    counts: dict[str, int] = {}
    rejects = 0
    overflows = 0
    for r in records:
        if r.overflowed:
            overflows += 1
        elif r.destination == "REJECT":
            rejects += 1
        else:
            counts[r.destination] = counts.get(r.destination, 0) + 1
    return SortReport(
        records=tuple(records),
        simulated_seconds=sum(r.cycle_time_s for r in records),
        compartment_counts=counts,
        rejects=rejects,
        overflows=overflows,
    )
