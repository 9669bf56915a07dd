#!/usr/bin/env python3
"""Compare manual and automated line throughput and print the cost crossover.

Simulates the same lot through both station configurations, reports rates,
annual capacity and where automation starts paying for itself.
"""

import argparse

import numpy as np

from ledsort import (
    LedModel,
    LotVariation,
    automated_config,
    breakeven,
    build_grid_screen,
    capacity,
    chromaticity,
    make_batch,
    manual_config,
    run,
    synth_spectrum,
    tristimulus,
)
from ledsort.linesim import DEFAULT_BREAKEVEN_PARAMS


def screen_for_model(model: LedModel, cell: float = 0.004):
    bare = LedModel(model.peak_wavelength_nm, model.fwhm_nm)
    xy = chromaticity(tristimulus(synth_spectrum(bare, np.random.default_rng(0))))
    return build_grid_screen(xy.x - 1.5 * cell, xy.y - 1.5 * cell, cell, cell, 3, 3)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=500)
    parser.add_argument("--hours-per-year", type=float, default=7500.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    model = LedModel(520.0, 120.0, 1.0, LotVariation(1.5, 2.0, 0.05))
    screen = screen_for_model(model)
    batch = make_batch(model, args.count, np.random.default_rng(args.seed))

    rows = []
    for label, cfg in (
        ("manual", manual_config(screen)),
        ("automated", automated_config(screen)),
    ):
        report = run(batch, cfg, seed=args.seed)
        rows.append(
            (
                label,
                report.leds_per_hour,
                capacity(cfg, args.hours_per_year),
                report.rejects,
                report.overflows,
            )
        )

    print(f"{'line':<10} {'LEDs/h':>8} {'LEDs/yr':>12} {'rejects':>8} {'overflow':>9}")
    for label, rate, per_year, rejects, overflows in rows:
        print(f"{label:<10} {rate:>8.1f} {per_year:>12.0f} {rejects:>8d} {overflows:>9d}")

    result = breakeven(
        DEFAULT_BREAKEVEN_PARAMS["manual_rate"],
        DEFAULT_BREAKEVEN_PARAMS["automated_rate"],
        DEFAULT_BREAKEVEN_PARAMS["manual_cost_per_hour"],
        DEFAULT_BREAKEVEN_PARAMS["automated_cost_per_hour"],
        DEFAULT_BREAKEVEN_PARAMS["automated_fixed_per_year"],
    )
    print()
    print(f"cost per LED: manual {result.manual_per_led:.3f}, automated {result.automated_per_led:.3f}")
    print(f"automation pays off from {result.threshold_per_year:,.0f} LEDs/year")


if __name__ == "__main__":
    main()
