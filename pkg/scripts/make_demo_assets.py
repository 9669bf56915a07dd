#!/usr/bin/env python3
"""Write a self-consistent demo asset set (screen, lot, job) into a directory.

The screen is centred on the lot's true chromaticity, so most LEDs land in a
bin and the REJECT compartment stays believable.
"""

import argparse
from pathlib import Path

import numpy as np

from ledsort import (
    LedModel,
    LotVariation,
    Mode,
    build_grid_screen,
    chromaticity,
    synth_spectrum,
    tristimulus,
)
from ledsort.configio import JobSpec, LotSpec, save_job, save_lot, save_screen


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", nargs="?", default="demo", type=Path)
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--peak-nm", type=float, default=520.0)
    parser.add_argument("--fwhm-nm", type=float, default=120.0)
    parser.add_argument("--speed", type=float, default=0.0, help="0 = max speed")
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    model = LedModel(
        args.peak_nm, args.fwhm_nm, 1.0, LotVariation(peak_nm=1.5, fwhm_nm=2.0, power=0.05)
    )
    bare = LedModel(args.peak_nm, args.fwhm_nm)
    xy = chromaticity(tristimulus(synth_spectrum(bare, np.random.default_rng(0))))

    cell = 0.004
    screen = build_grid_screen(
        xy.x - 1.5 * cell, xy.y - 1.5 * cell, cell, cell, 3, 3, name="demo-screen"
    )
    save_screen(screen, args.out_dir / "demo.screen")
    save_lot(LotSpec("demo-lot", model, args.count, seed=42), args.out_dir / "demo.lot")
    save_job(
        JobSpec(
            name="demo-job",
            mode=Mode.Automated,
            lot_ref="demo.lot",
            screen_ref="demo.screen",
            seed=7,
            speed=args.speed,
            compartments=None,
            timing_overrides=(),
        ),
        args.out_dir / "demo.job",
    )
    print(f"wrote demo.screen, demo.lot, demo.job to {args.out_dir}/")
    print(f"lot chromaticity centre: ({xy.x:.4f}, {xy.y:.4f})")
    print(f"try: ledsort sort {args.out_dir / 'demo.job'}")


if __name__ == "__main__":
    main()
