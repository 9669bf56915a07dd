"""Discrete-event simulation of the manual and automated LED selection lines.

One LED is in flight at a time: the cycle is the sum of the phase durations
(pick, place, shield, measure, compute, deposit) and throughput is
3600 * n / total simulated seconds. Instrument latency is data, not real
sleeping, so simulated hours run in milliseconds.

Default timing calibration
--------------------------
Automated: pick 3.0 s, place 2.0 s, measure 0.05 s (the direct instrument's
read time) and deposit as the remainder to a 9.0 s total, i.e. 3.95 s. Only
the total cycle and the measurement time are known quantities; the split is
calibrated, not measured. Manual: pick 5, place 3, shield 2, measure 10,
compute 2 and deposit uniform in [8, 14] s, giving 30-36 s per LED.

Break-even calibration
----------------------
The documented cost parameters are 110 LEDs/h at 33.00/h for the manual
station versus 400 LEDs/h at 40.00/h plus 30000.00/yr fixed for the machine:
0.30 vs 0.10 per LED, so automation pays off from 150000 LEDs per year.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .binning import REJECT, BinAssignment, BinScreen, classify, validate_screen
from .cmf import Observer
from .colorimetry import DEFAULT_LUMEN_CALIBRATION, chromaticity, luminous_value, tristimulus
from .instrument import (
    DirectInstrumentModel,
    LedSample,
    SpectralInstrumentModel,
    measure_direct,
    measure_spectral,
)


class ConfigError(ValueError):
    """Mode, screen, carousel and instrument do not form a runnable line."""


class InfiniteRate(ValueError):
    """Zero mean cycle time; the throughput question is ill-posed."""


class NeverBreaksEven(ValueError):
    """Automated costs dominate manual costs at every annual volume."""


# ---------------------------------------------------------------------------
# Durations and timing tables


@dataclass(frozen=True)
class Fixed:
    seconds: float

    def __post_init__(self) -> None:
        if self.seconds < 0:
            raise ValueError("duration cannot be negative")

    def sample(self, rng: np.random.Generator) -> float:
        return self.seconds

    @property
    def mean(self) -> float:
        return self.seconds


@dataclass(frozen=True)
class Uniform:
    low: float
    high: float

    def __post_init__(self) -> None:
        if not 0 <= self.low <= self.high:
            raise ValueError("need 0 <= low <= high")

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.low, self.high))

    @property
    def mean(self) -> float:
        return 0.5 * (self.low + self.high)


@dataclass(frozen=True)
class Normal:
    """Gaussian duration, truncated at zero when sampling."""

    mean_s: float
    sigma_s: float

    def __post_init__(self) -> None:
        if self.mean_s < 0 or self.sigma_s < 0:
            raise ValueError("mean and sigma cannot be negative")

    def sample(self, rng: np.random.Generator) -> float:
        return max(float(rng.normal(self.mean_s, self.sigma_s)), 0.0)

    @property
    def mean(self) -> float:
        return self.mean_s


Duration = Union[Fixed, Uniform, Normal]

PHASES = ("pick", "place", "shield", "measure", "compute", "deposit")


@dataclass(frozen=True)
class StationTimings:
    """Per-phase durations; ``measure=None`` takes the instrument's read time."""

    pick: Duration = Fixed(0.0)
    place: Duration = Fixed(0.0)
    shield: Duration = Fixed(0.0)
    measure: Duration | None = None
    compute: Duration = Fixed(0.0)
    deposit: Duration = Fixed(0.0)


def default_automated_timings() -> StationTimings:
    """Deterministic 9.0 s cycle with the 50 ms direct read.

    The deposit phase is the float remainder to exactly 9.0 s in the order the
    engine accumulates phases, so a default run reports 400.0 LEDs/h exactly.
    """
    handling = ((0.0 + 3.0) + 2.0) + 0.0  # pick + place + shield
    measured = (handling + 0.05) + 0.0  # + measure + compute
    return StationTimings(
        pick=Fixed(3.0),
        place=Fixed(2.0),
        shield=Fixed(0.0),
        measure=Fixed(0.05),
        compute=Fixed(0.0),
        deposit=Fixed(9.0 - measured),
    )


def default_manual_timings() -> StationTimings:
    """Hand-station phases summing to a uniform 30-36 s per LED."""
    return StationTimings(
        pick=Fixed(5.0),
        place=Fixed(3.0),
        shield=Fixed(2.0),
        measure=Fixed(10.0),
        compute=Fixed(2.0),
        deposit=Uniform(8.0, 14.0),
    )


# ---------------------------------------------------------------------------
# Carousel


@dataclass(frozen=True)
class Compartment:
    index: int
    target: str  # bin id or REJECT
    capacity: int | None = None  # None = unlimited

    def __post_init__(self) -> None:
        if self.capacity is not None and self.capacity < 0:
            raise ValueError("capacity cannot be negative")


@dataclass(frozen=True)
class Carousel:
    compartments: tuple[Compartment, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "compartments", tuple(self.compartments))

    def target_map(self) -> dict[str, Compartment]:
        return {c.target: c for c in self.compartments}

    def check_against(self, screen: BinScreen) -> None:
        """Raise ConfigError unless every bin id and REJECT map to one compartment."""
        targets = [c.target for c in self.compartments]
        dupes = sorted({t for t in targets if targets.count(t) > 1})
        if dupes:
            raise ConfigError(f"carousel maps targets more than once: {', '.join(dupes)}")
        missing = [bid for bid in screen.bin_ids() if bid not in targets]
        if missing:
            raise ConfigError(f"carousel lacks compartments for bins: {', '.join(missing)}")
        if REJECT not in targets:
            raise ConfigError("carousel lacks the REJECT compartment")


def carousel_for_screen(screen: BinScreen, capacity: int | None = None) -> Carousel:
    """One compartment per bin in screen order, plus the REJECT compartment."""
    comps = [Compartment(i, bid, capacity) for i, bid in enumerate(screen.bin_ids())]
    comps.append(Compartment(len(comps), REJECT, capacity))
    return Carousel(tuple(comps))


# ---------------------------------------------------------------------------
# Mode configuration


class Mode(enum.Enum):
    Manual = "Manual"
    Automated = "Automated"


@dataclass(frozen=True)
class ModeConfig:
    mode: Mode
    screen: BinScreen
    timings: StationTimings
    instrument: SpectralInstrumentModel | DirectInstrumentModel
    carousel: Carousel | None = None
    observer: Observer = Observer.CIE1931_2deg
    lumen_calibration: float = DEFAULT_LUMEN_CALIBRATION

    def __post_init__(self) -> None:
        if self.mode is Mode.Manual:
            if not isinstance(self.instrument, SpectralInstrumentModel):
                raise ConfigError("manual mode needs the spectral instrument")
            if self.carousel is not None:
                raise ConfigError("the carousel belongs to the automated line only")
        else:
            if not isinstance(self.instrument, DirectInstrumentModel):
                raise ConfigError("automated mode needs the direct instrument")
            if self.timings.compute.mean != 0.0:
                raise ConfigError("automated mode has no compute phase")

    def measure_duration(self) -> Duration:
        if self.timings.measure is not None:
            return self.timings.measure
        return Fixed(self.instrument.measurement_time_s)


def automated_config(
    screen: BinScreen,
    instrument: DirectInstrumentModel | None = None,
    timings: StationTimings | None = None,
    carousel: Carousel | None = None,
    observer: Observer = Observer.CIE1931_2deg,
) -> ModeConfig:
    """The automated line with default (calibrated) timings and carousel."""
    return ModeConfig(
        mode=Mode.Automated,
        screen=screen,
        timings=timings if timings is not None else default_automated_timings(),
        instrument=instrument if instrument is not None else DirectInstrumentModel(),
        carousel=carousel if carousel is not None else carousel_for_screen(screen),
        observer=observer,
    )


def manual_config(
    screen: BinScreen,
    instrument: SpectralInstrumentModel | None = None,
    timings: StationTimings | None = None,
    observer: Observer = Observer.CIE1931_2deg,
) -> ModeConfig:
    """The hand station with default (calibrated) timings."""
    return ModeConfig(
        mode=Mode.Manual,
        screen=screen,
        timings=timings if timings is not None else default_manual_timings(),
        instrument=instrument if instrument is not None else SpectralInstrumentModel(),
        observer=observer,
    )


# ---------------------------------------------------------------------------
# Apparatus state machine


class MachinePhase(enum.Enum):
    Idle = "Idle"
    Feeding = "Feeding"
    Picking = "Picking"
    InChuck = "InChuck"
    Measuring = "Measuring"
    Classifying = "Classifying"
    Depositing = "Depositing"
    Fault = "Fault"


class EventKind(enum.Enum):
    StartJob = "StartJob"
    LedAvailable = "LedAvailable"
    BatchEmpty = "BatchEmpty"
    PickDone = "PickDone"
    ChuckLoaded = "ChuckLoaded"
    MeasureDone = "MeasureDone"
    ClassifyDone = "ClassifyDone"
    DepositDone = "DepositDone"
    Reset = "Reset"


@dataclass(frozen=True)
class MachineEvent:
    kind: EventKind
    payload: object | None = None


@dataclass(frozen=True)
class MachineState:
    phase: MachinePhase = MachinePhase.Idle
    fault_reason: str | None = None


_TRANSITIONS: dict[tuple[MachinePhase, EventKind], MachinePhase] = {
    (MachinePhase.Idle, EventKind.StartJob): MachinePhase.Feeding,
    (MachinePhase.Feeding, EventKind.LedAvailable): MachinePhase.Picking,
    (MachinePhase.Feeding, EventKind.BatchEmpty): MachinePhase.Idle,
    (MachinePhase.Picking, EventKind.PickDone): MachinePhase.InChuck,
    (MachinePhase.InChuck, EventKind.ChuckLoaded): MachinePhase.Measuring,
    (MachinePhase.Measuring, EventKind.MeasureDone): MachinePhase.Classifying,
    (MachinePhase.Classifying, EventKind.ClassifyDone): MachinePhase.Depositing,
    (MachinePhase.Depositing, EventKind.DepositDone): MachinePhase.Feeding,
    (MachinePhase.Fault, EventKind.Reset): MachinePhase.Idle,
}


def step(state: MachineState, event: MachineEvent) -> MachineState:
    """Total transition function; illegal events land in Fault with a diagnostic."""
    nxt = _TRANSITIONS.get((state.phase, event.kind))
    if nxt is None:
        if state.phase is MachinePhase.Fault:
            return state  # stays faulted until Reset
        return MachineState(
            MachinePhase.Fault,
            f"illegal event {event.kind.value} in state {state.phase.value}",
        )
    return MachineState(nxt, None)


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class LedRecord:
    led_id: str
    x: float
    y: float
    lumens: float
    assignment: BinAssignment
    destination: str  # compartment target: bin id or REJECT
    compartment: int | None  # carousel index, None for the hand station
    overflowed: bool
    cycle_time_s: float


@dataclass(frozen=True)
class SortReport:
    """Per-LED ledger plus the aggregates of one simulated run."""

    records: tuple[LedRecord, ...]
    simulated_seconds: float
    compartment_counts: dict[str, int]  # deposited, keyed by bin id (REJECT excluded)
    rejects: int
    overflows: int

    @property
    def count(self) -> int:
        return len(self.records)

    @property
    def leds_per_hour(self) -> float:
        if self.simulated_seconds <= 0:
            return 0.0
        return 3600.0 * self.count / self.simulated_seconds


# ---------------------------------------------------------------------------
# Engine


class SortEngine:
    """Pausable one-LED-at-a-time engine behind run().

    ``process_next`` advances exactly one LED through the apparatus state
    machine and returns its record, or None when the batch is exhausted.
    Supervising services interleave control commands between calls; state
    snapshots handed out are immutable values.
    """

    def __init__(
        self,
        batch: Sequence[LedSample],
        cfg: ModeConfig,
        seed: int | None = 0,
        validate: bool = True,
    ):
        if validate:
            diags = validate_screen(cfg.screen)
            if diags:
                raise ConfigError(
                    "screen is invalid: " + "; ".join(str(d) for d in diags)
                )
        if cfg.mode is Mode.Automated:
            if cfg.carousel is None:
                raise ConfigError("automated mode needs a carousel")
            cfg.carousel.check_against(cfg.screen)
        self.cfg = cfg
        self._batch = list(batch)
        self._rng = np.random.default_rng(seed)
        self._next = 0
        self._records: list[LedRecord] = []
        self._elapsed = 0.0
        self._counts: dict[str, int] = {bid: 0 for bid in cfg.screen.bin_ids()}
        self._deposited: dict[str, int] = {}  # per-compartment-target, incl. REJECT
        self._rejects = 0
        self._overflows = 0
        self._machine = step(MachineState(), MachineEvent(EventKind.StartJob))

    @property
    def total(self) -> int:
        return len(self._batch)

    @property
    def processed(self) -> int:
        return self._next

    @property
    def machine(self) -> MachineState:
        return self._machine

    @property
    def compartment_counts(self) -> dict[str, int]:
        return dict(self._counts)

    @property
    def rejects(self) -> int:
        return self._rejects

    @property
    def overflows(self) -> int:
        return self._overflows

    def _advance(self, kind: EventKind, payload: object | None = None) -> None:
        self._machine = step(self._machine, MachineEvent(kind, payload))
        if self._machine.phase is MachinePhase.Fault:
            raise ConfigError(f"apparatus fault: {self._machine.fault_reason}")

    def process_next(self) -> LedRecord | None:
        """Run one full feed-measure-classify-deposit cycle."""
        if self._next >= len(self._batch):
            if self._machine.phase is MachinePhase.Feeding:
                self._advance(EventKind.BatchEmpty)
            return None
        sample = self._batch[self._next]
        cfg, rng, t = self.cfg, self._rng, self.cfg.timings

        cycle = 0.0
        self._advance(EventKind.LedAvailable)
        cycle += t.pick.sample(rng)
        cycle += t.place.sample(rng)
        self._advance(EventKind.PickDone)
        cycle += t.shield.sample(rng)
        self._advance(EventKind.ChuckLoaded)

        if cfg.mode is Mode.Manual:
            spectrum = measure_spectral(sample.spd, cfg.instrument, rng)
            cycle += cfg.measure_duration().sample(rng)
            self._advance(EventKind.MeasureDone)
            tri = tristimulus(spectrum, cfg.observer)
            xy = chromaticity(tri)
            lumens = luminous_value(tri, cfg.lumen_calibration)
            cycle += t.compute.sample(rng)
        else:
            xy, lumens, _elapsed = measure_direct(
                sample.spd, cfg.instrument, rng, cfg.observer, cfg.lumen_calibration
            )
            cycle += cfg.measure_duration().sample(rng)
            self._advance(EventKind.MeasureDone)
            cycle += t.compute.sample(rng)

        assignment = classify(xy, lumens, cfg.screen)
        destination = REJECT if assignment.is_reject else assignment.chroma_bin
        self._advance(EventKind.ClassifyDone, assignment)

        compartment: int | None = None
        overflowed = False
        if cfg.carousel is not None:
            comp = cfg.carousel.target_map()[destination]
            filled = self._deposited.get(destination, 0)
            if comp.capacity is not None and filled >= comp.capacity:
                overflowed = True
            else:
                compartment = comp.index
        if not overflowed:
            self._deposited[destination] = self._deposited.get(destination, 0) + 1
            if destination == REJECT:
                self._rejects += 1
            else:
                self._counts[destination] += 1
        else:
            self._overflows += 1
        cycle += t.deposit.sample(rng)
        self._advance(EventKind.DepositDone)

        self._elapsed += cycle
        record = LedRecord(
            led_id=sample.id,
            x=xy.x,
            y=xy.y,
            lumens=lumens,
            assignment=assignment,
            destination=destination,
            compartment=compartment,
            overflowed=overflowed,
            cycle_time_s=cycle,
        )
        self._records.append(record)
        self._next += 1
        return record

    def report(self) -> SortReport:
        """Snapshot of everything processed so far (final once exhausted)."""
        return SortReport(
            records=tuple(self._records),
            simulated_seconds=self._elapsed,
            compartment_counts=dict(self._counts),
            rejects=self._rejects,
            overflows=self._overflows,
        )

    def run(self) -> SortReport:
        while self.process_next() is not None:
            pass
        return self.report()


def run(batch: Sequence[LedSample], cfg: ModeConfig, seed: int | None = 0) -> SortReport:
    """Simulate a whole batch; deterministic in (batch, cfg, seed)."""
    return SortEngine(batch, cfg, seed).run()


# ---------------------------------------------------------------------------
# Throughput and economics


def mean_cycle_seconds(cfg: ModeConfig) -> float:
    t = cfg.timings
    total = 0.0
    # Same accumulation order as the engine so deterministic tables stay exact.
    for dur in (t.pick, t.place, t.shield, cfg.measure_duration(), t.compute, t.deposit):
        total += dur.mean
    return total


def capacity(cfg: ModeConfig, hours_per_year: float) -> float:
    """LEDs per year at the deterministic mean cycle time."""
    if hours_per_year <= 0:
        raise ValueError("hours_per_year must be positive")
    cycle = mean_cycle_seconds(cfg)
    if cycle <= 0:
        raise InfiniteRate("mean cycle time is zero")
    return 3600.0 / cycle * hours_per_year


class Recommendation(enum.Enum):
    MANUAL = "MANUAL"
    AUTOMATED = "AUTOMATED"


@dataclass(frozen=True)
class BreakevenResult:
    """Annual volume above which the automated line is the cheaper choice."""

    threshold_per_year: float
    manual_per_led: float
    automated_per_led: float
    automated_fixed_per_year: float

    def recommend(self, volume_per_year: float) -> Recommendation:
        if volume_per_year >= self.threshold_per_year:
            return Recommendation.AUTOMATED
        return Recommendation.MANUAL


#: Cost parameters calibrated so the recommendation flips at 150000 LEDs/yr.
DEFAULT_BREAKEVEN_PARAMS = {
    "manual_rate": 110.0,
    "automated_rate": 400.0,
    "manual_cost_per_hour": 33.0,
    "automated_cost_per_hour": 40.0,
    "automated_fixed_per_year": 30000.0,
}


def breakeven(
    manual_rate: float,
    automated_rate: float,
    manual_cost_per_hour: float,
    automated_cost_per_hour: float,
    automated_fixed_per_year: float,
) -> BreakevenResult:
    """Smallest annual volume where automated total cost <= manual total cost.

    Linear cost model: rate-scaled hourly costs plus a fixed yearly cost on
    the automated side. Raises NeverBreaksEven when automation is dominated
    at every volume.
    """
    if manual_rate <= 0 or automated_rate <= 0:
        raise ValueError("rates must be positive")
    if min(manual_cost_per_hour, automated_cost_per_hour, automated_fixed_per_year) < 0:
        raise ValueError("costs cannot be negative")
    per_manual = manual_cost_per_hour / manual_rate
    per_auto = automated_cost_per_hour / automated_rate
    if per_auto < per_manual:
        threshold = automated_fixed_per_year / (per_manual - per_auto)
    elif per_auto == per_manual and automated_fixed_per_year == 0:
        threshold = 0.0
    else:
        raise NeverBreaksEven(
            "automated per-LED cost is not below manual and fixed cost does not vanish"
        )
    return BreakevenResult(threshold, per_manual, per_auto, automated_fixed_per_year)
