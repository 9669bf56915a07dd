"""Acceptance suite: one test per release criterion, at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v`` for one pass/fail line per
criterion; tolerances are pinned here, not configurable.
"""

import time
from importlib import resources

import numpy as np
import pytest

from ledsort import (
    ChromaticityXY,
    DirectInstrumentModel,
    Fixed,
    LedModel,
    REJECT,
    SpectralInstrumentModel,
    StationTimings,
    Tristimulus,
    Uniform,
    automated_config,
    breakeven,
    build_grid_screen,
    capacity,
    chromaticity,
    classify,
    macadam_1942_ellipses,
    make_batch,
    manual_config,
    measure_direct,
    measure_spectral,
    refine_screen,
    run,
    synth_spectrum,
    tristimulus,
    uniformity_report,
)
from ledsort.configio import format_report_csv, format_report_summary
from ledsort.linesim import DEFAULT_BREAKEVEN_PARAMS, SortEngine
from ledsort.spectra import SpectralPowerDistribution

from conftest import screen_around


def _ok(name: str) -> None:
    print(f"[ACCEPTANCE] {name}: PASS")


def test_normalization_and_scale_invariance():
    rng = np.random.default_rng(20240601)
    X = rng.uniform(1e-6, 1e3, 100_000)
    Y = rng.uniform(1e-6, 1e3, 100_000)
    Z = rng.uniform(1e-6, 1e3, 100_000)
    c = rng.uniform(1e-3, 1e3, 100_000)
    for i in range(100_000):
        xy = chromaticity(Tristimulus(X[i], Y[i], Z[i]))
        assert abs(xy.x + xy.y + xy.z - 1.0) < 1e-12
        scaled = chromaticity(Tristimulus(c[i] * X[i], c[i] * Y[i], c[i] * Z[i]))
        assert abs(xy.x - scaled.x) < 1e-12
        assert abs(xy.y - scaled.y) < 1e-12
    _ok("normalization: 1e5 triples sum to 1 and scale-invariant within 1e-12")


def test_equal_energy_point_against_brute_force_oracle():
    # Oracle: raw column sums of the shipped table, no SPD machinery involved.
    ref = resources.files("ledsort.data").joinpath("cie1931_2deg_5nm.txt")
    with resources.as_file(ref) as path:
        table = np.loadtxt(path)
    sx, sy, sz = table[:, 1].sum(), table[:, 2].sum(), table[:, 3].sum()
    oracle = (sx / (sx + sy + sz), sy / (sx + sy + sz))
    assert abs(oracle[0] - 1 / 3) < 2e-3 and abs(oracle[1] - 1 / 3) < 2e-3

    flat = SpectralPowerDistribution(np.array([380.0, 780.0]), np.array([1.0, 1.0]))
    xy = chromaticity(tristimulus(flat))
    assert abs(xy.x - 1 / 3) < 2e-3
    assert abs(xy.y - 1 / 3) < 2e-3
    assert abs(xy.x - oracle[0]) < 1e-12 and abs(xy.y - oracle[1]) < 1e-12
    _ok("equal-energy point: (1/3, 1/3) within 2e-3, matches brute-force oracle")


def test_workflow_equivalence_of_the_two_measurement_paths():
    rng = np.random.default_rng(7)
    spectral = SpectralInstrumentModel(0.0, 0.0)
    direct = DirectInstrumentModel(0.0, 0.0)
    for _ in range(100):
        model = LedModel(
            peak_wavelength_nm=rng.uniform(410.0, 690.0),
            fwhm_nm=rng.uniform(12.0, 80.0),
            peak_power=rng.uniform(0.2, 3.0),
        )
        spd = synth_spectrum(model, np.random.default_rng(0))
        manual_xy = chromaticity(
            tristimulus(measure_spectral(spd, spectral, np.random.default_rng(1)))
        )
        direct_xy, _, _ = measure_direct(spd, direct, np.random.default_rng(1))
        assert abs(manual_xy.x - direct_xy.x) < 1e-9
        assert abs(manual_xy.y - direct_xy.y) < 1e-9
    _ok("workflow equivalence: noiseless spectral+compute == direct within 1e-9 (100 models)")


def test_automated_throughput_and_annual_capacity(green_led):
    screen = screen_around(green_led)
    cfg = automated_config(screen)
    batch = make_batch(green_led, 100, np.random.default_rng(2))
    started = time.perf_counter()
    report = run(batch, cfg, seed=42)
    wall = time.perf_counter() - started
    assert report.simulated_seconds == 900.0
    assert report.leds_per_hour == 400.0
    assert capacity(cfg, 7500.0) == 3_000_000.0
    assert wall < 1.0
    _ok("automated throughput: 9.0 s cycle -> exactly 400/h and 3,000,000/yr; run < 1 s wall")


def test_manual_throughput_band(green_led):
    screen = screen_around(green_led)
    timings = StationTimings(measure=Fixed(0.0), deposit=Uniform(30.0, 36.0))
    cfg = manual_config(screen, timings=timings)
    batch = make_batch(green_led, 500, np.random.default_rng(3))
    for seed in range(10):
        report = run(batch, cfg, seed=seed)
        assert 100.0 <= report.leds_per_hour <= 120.0, f"seed {seed}: {report.leds_per_hour}"
    _ok("manual throughput: uniform 30-36 s cycles stay in 100-120 LEDs/h (10 x 500)")


def test_precision_calibration_of_both_instruments(green_led):
    spd = synth_spectrum(green_led, np.random.default_rng(0))
    truth = chromaticity(tristimulus(spd))
    rng = np.random.default_rng(999)
    direct = DirectInstrumentModel(chroma_noise=0.0002)
    dx, dy = [], []
    for _ in range(10_000):
        xy, _, _ = measure_direct(spd, direct, rng)
        dx.append(xy.x - truth.x)
        dy.append(xy.y - truth.y)
    assert np.std(dx) == pytest.approx(0.0002, rel=0.10)
    assert np.std(dy) == pytest.approx(0.0002, rel=0.10)

    spectral = SpectralInstrumentModel(wavelength_accuracy_nm=0.5)
    shifts = [
        measure_spectral(spd, spectral, rng).meta["wavelength_shift_nm"]
        for _ in range(10_000)
    ]
    assert np.std(shifts) == pytest.approx(0.5, rel=0.05)
    _ok("precision: direct sigma 0.0002/axis within 10%, spectral shift sigma 0.5 nm within 5%")


def test_breakeven_flips_at_150k():
    result = breakeven(
        DEFAULT_BREAKEVEN_PARAMS["manual_rate"],
        DEFAULT_BREAKEVEN_PARAMS["automated_rate"],
        DEFAULT_BREAKEVEN_PARAMS["manual_cost_per_hour"],
        DEFAULT_BREAKEVEN_PARAMS["automated_cost_per_hour"],
        DEFAULT_BREAKEVEN_PARAMS["automated_fixed_per_year"],
    )
    assert abs(result.threshold_per_year - 150_000.0) <= 1.0
    assert result.recommend(result.threshold_per_year - 1.0).value == "MANUAL"
    assert result.recommend(result.threshold_per_year + 1.0).value == "AUTOMATED"
    _ok("break-even: documented costs flip the recommendation at 150,000 +/- 1 LEDs/yr")


def test_screen_properties():
    # refinement nesting on 1e4 random interior points
    base = build_grid_screen(0.28, 0.28, 0.005, 0.005, 4, 4)
    fine = refine_screen(base, 2)
    rng = np.random.default_rng(17)
    pts = rng.uniform(0.275, 0.305, size=(10_000, 2))
    for x, y in pts:
        p = ChromaticityXY(x, y)
        parent = classify(p, 1.0, base).chroma_bin
        child = classify(p, 1.0, fine).chroma_bin
        if parent == REJECT:
            assert child == REJECT
        else:
            assert child.startswith(parent + "/")

    # partition: exactly one bin or REJECT
    for x, y in pts[:2000]:
        containing = [b.id for b in base.bins if b.contains(x, y)]
        got = classify(ChromaticityXY(x, y), 1.0, base).chroma_bin
        if containing:
            assert got == containing[0]
        else:
            assert got == REJECT

    # embedded-dataset ordering: green ellipses dwarf blue ones
    ellipses = macadam_1942_ellipses()
    green = [e.area for e in ellipses if e.center.y > 0.5]
    blue = [e.area for e in ellipses if e.center.x < 0.2 and e.center.y < 0.2]
    assert (sum(green) / len(green)) >= 3.0 * (sum(blue) / len(blue))

    # identical cells score wider in blue than in green
    for (bx, by), (gx, gy) in [
        ((0.17, 0.09), (0.16, 0.62)),
        ((0.20, 0.12), (0.21, 0.54)),
        ((0.25, 0.13), (0.26, 0.46)),
    ]:
        blue_cell = build_grid_screen(bx - 0.005, by - 0.005, 0.01, 0.01, 1, 1)
        green_cell = build_grid_screen(gx - 0.005, gy - 0.005, 0.01, 0.01, 1, 1)
        w_blue = uniformity_report(blue_cell, ellipses).widths["R0C0"]
        w_green = uniformity_report(green_cell, ellipses).widths["R0C0"]
        assert w_blue > w_green
    _ok("screen properties: nesting (1e4 pts), partition, 3x area ordering, blue wider than green")


def test_conservation_and_reproducibility(green_led):
    screen = screen_around(green_led, nx=3, ny=3, cell=0.003)
    batch = make_batch(
        LedModel(
            green_led.peak_wavelength_nm,
            green_led.fwhm_nm,
            variation=green_led.variation,
        ),
        200,
        np.random.default_rng(8),
    )
    from ledsort import carousel_for_screen

    cfg = automated_config(screen, carousel=carousel_for_screen(screen, capacity=10))
    report = run(batch, cfg, seed=31)
    assert report.overflows > 0  # capacity pressure exercised
    assert sum(report.compartment_counts.values()) + report.rejects + report.overflows == 200

    twin = run(batch, cfg, seed=31)
    assert format_report_csv(twin) == format_report_csv(report)
    assert format_report_summary(twin, "demo") == format_report_summary(report, "demo")

    engines = [SortEngine(batch, cfg, seed=31) for _ in range(2)]
    assert engines[0].run() == engines[1].run()
    _ok("conservation: compartments + rejects + overflows == input; same seed -> same bytes")
