"""Synthetic LED lots and models of the two measurement instruments.

Two instrument families are simulated. The spectral instrument returns a
perturbed spectrum (wavelength calibration error plus per-sample amplitude
noise) and leaves the chromaticity computation to the caller, which is the
manual-station workflow. The direct instrument returns a chromaticity and a
photometric value outright, with Gaussian per-axis noise, which is the
automated-line workflow. All randomness flows through an explicit
numpy Generator so runs are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cmf import Observer, cmf_table
from .colorimetry import (
    DEFAULT_LUMEN_CALIBRATION,
    ChromaticityXY,
    chromaticity,
    luminous_value,
    tristimulus,
)
from .spectra import WAVELENGTH_MAX_NM, WAVELENGTH_MIN_NM, SpectralPowerDistribution

_GAUSS_SHAPE = 4.0 * np.log(2.0)  # exponent factor turning FWHM into a Gaussian width
_POWER_FLOOR = 1e-12
_FWHM_FLOOR_NM = 1e-3


@dataclass(frozen=True)
class LotVariation:
    """Per-lot 1-sigma spreads of the three LED model parameters."""

    peak_nm: float = 0.0
    fwhm_nm: float = 0.0
    power: float = 0.0

    def __post_init__(self) -> None:
        if min(self.peak_nm, self.fwhm_nm, self.power) < 0:
            raise ValueError("standard deviations cannot be negative")


@dataclass(frozen=True)
class LedModel:
    """Single-band Gaussian LED: peak wavelength, FWHM and peak power."""

    peak_wavelength_nm: float
    fwhm_nm: float
    peak_power: float = 1.0
    variation: LotVariation = field(default_factory=LotVariation)

    def __post_init__(self) -> None:
        if not 380.0 <= self.peak_wavelength_nm <= 780.0:
            raise ValueError("peak wavelength must lie in [380, 780] nm")
        if self.fwhm_nm <= 0:
            raise ValueError("fwhm must be positive")
        if self.peak_power <= 0:
            raise ValueError("peak power must be positive")


@dataclass(frozen=True)
class SpectralInstrumentModel:
    """Spectrum-reading instrument: wavelength accuracy and amplitude noise."""

    wavelength_accuracy_nm: float = 0.5
    amplitude_noise: float = 0.0
    measurement_time_s: float = 10.0

    def __post_init__(self) -> None:
        if min(self.wavelength_accuracy_nm, self.amplitude_noise, self.measurement_time_s) < 0:
            raise ValueError("instrument parameters cannot be negative")


@dataclass(frozen=True)
class DirectInstrumentModel:
    """Chromaticity-reading instrument: per-axis noise and relative lumen noise."""

    chroma_noise: float = 0.0002
    lumen_noise: float = 0.0
    measurement_time_s: float = 0.050

    def __post_init__(self) -> None:
        if min(self.chroma_noise, self.lumen_noise, self.measurement_time_s) < 0:
            raise ValueError("instrument parameters cannot be negative")


def synth_spectrum(
    model: LedModel,
    rng: np.random.Generator,
    observer: Observer = Observer.CIE1931_2deg,
) -> SpectralPowerDistribution:
    """Draw one LED from the lot and sample its Gaussian line on the CMF grid.

    Parameters falling outside the model invariants after perturbation are
    clamped back to the bounds and listed under ``meta["clamped"]``.
    """
    grid = cmf_table(observer).wavelengths_nm
    peak = model.peak_wavelength_nm + rng.normal(0.0, model.variation.peak_nm)
    fwhm = model.fwhm_nm + rng.normal(0.0, model.variation.fwhm_nm)
    power = model.peak_power + rng.normal(0.0, model.variation.power)
    clamped = []
    if not 380.0 <= peak <= 780.0:
        peak = min(max(peak, 380.0), 780.0)
        clamped.append("peak_wavelength_nm")
    if fwhm < _FWHM_FLOOR_NM:
        fwhm = _FWHM_FLOOR_NM
        clamped.append("fwhm_nm")
    if power < _POWER_FLOOR:
        power = _POWER_FLOOR
        clamped.append("peak_power")
    values = power * np.exp(-_GAUSS_SHAPE * ((grid - peak) / fwhm) ** 2)
    meta = {
        "peak_wavelength_nm": float(peak),
        "fwhm_nm": float(fwhm),
        "peak_power": float(power),
        "clamped": tuple(clamped),
    }
    return SpectralPowerDistribution(grid.copy(), values, meta)


@dataclass(frozen=True)
class LedSample:
    """One physical LED queued for sorting."""

    id: str
    spd: SpectralPowerDistribution


def make_batch(
    model: LedModel,
    count: int,
    rng: np.random.Generator,
    prefix: str = "LED",
    observer: Observer = Observer.CIE1931_2deg,
) -> list[LedSample]:
    """Synthesize ``count`` LEDs from one lot model."""
    if count < 0:
        raise ValueError("count cannot be negative")
    return [
        LedSample(f"{prefix}-{i + 1:04d}", synth_spectrum(model, rng, observer))
        for i in range(count)
    ]


def measure_spectral(
    spd: SpectralPowerDistribution,
    m: SpectralInstrumentModel,
    rng: np.random.Generator,
) -> SpectralPowerDistribution:
    """One spectral read: a common wavelength shift plus per-sample gain noise.

    The caller computes chromaticity from the returned spectrum; the applied
    shift is recorded in ``meta["wavelength_shift_nm"]``.
    """
    shift = rng.normal(0.0, m.wavelength_accuracy_nm)
    lo, hi = spd.support()
    # A shift can never push samples outside the physical wavelength window.
    shift = min(max(shift, WAVELENGTH_MIN_NM - lo), WAVELENGTH_MAX_NM - hi)
    gain = rng.normal(1.0, m.amplitude_noise, size=spd.power.size)
    meta = dict(spd.meta)
    meta["wavelength_shift_nm"] = float(shift)
    return SpectralPowerDistribution(
        spd.wavelengths_nm + shift,
        np.maximum(spd.power * gain, 0.0),
        meta,
    )


def _project_into_simplex(x: float, y: float) -> tuple[float, float]:
    # Noise can push a point just past the x+y=1 edge for deep-red LEDs;
    # project back orthogonally, then clip the axes.
    if x + y > 1.0:
        excess = 0.5 * (x + y - 1.0)
        x -= excess
        y -= excess
    return max(x, 0.0), max(y, 0.0)


def measure_direct(
    spd: SpectralPowerDistribution,
    m: DirectInstrumentModel,
    rng: np.random.Generator,
    observer: Observer = Observer.CIE1931_2deg,
    lumen_calibration: float = DEFAULT_LUMEN_CALIBRATION,
) -> tuple[ChromaticityXY, float, float]:
    """One direct read: (chromaticity, photometric value, elapsed seconds).

    Raises ZeroTristimulus for dark spectra, mirroring a failed measurement.
    """
    t = tristimulus(spd, observer)
    true_xy = chromaticity(t)
    x = true_xy.x + rng.normal(0.0, m.chroma_noise)
    y = true_xy.y + rng.normal(0.0, m.chroma_noise)
    x, y = _project_into_simplex(x, y)
    lumens = luminous_value(t, lumen_calibration) * max(1.0 + rng.normal(0.0, m.lumen_noise), 0.0)
    return ChromaticityXY(x, y), lumens, m.measurement_time_s
