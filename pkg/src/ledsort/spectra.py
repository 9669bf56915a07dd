"""Spectral power distributions: optical power sampled over wavelength."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

WAVELENGTH_MIN_NM = 200.0
WAVELENGTH_MAX_NM = 1200.0


class InvalidSpd(ValueError):
    """Samples violate the SPD invariants (ordering, sign or range)."""


@dataclass(frozen=True)
class SpectralPowerDistribution:
    """Power per wavelength on an arbitrary, strictly increasing sample grid.

    Power is in relative units (watts per nanometre up to an unknown scale);
    all downstream chromaticity math is scale invariant. ``meta`` carries
    provenance such as synthesis parameters or applied instrument errors and
    never participates in equality.
    """

    wavelengths_nm: np.ndarray
    power: np.ndarray
    meta: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        wl = np.asarray(self.wavelengths_nm, dtype=float)
        p = np.asarray(self.power, dtype=float)
        if wl.ndim != 1 or p.ndim != 1 or wl.shape != p.shape:
            raise InvalidSpd("wavelengths and power must be 1-d arrays of equal length")
        if wl.size < 2:
            raise InvalidSpd("an SPD needs at least 2 samples")
        if not np.all(np.diff(wl) > 0):
            raise InvalidSpd("wavelengths must be strictly increasing")
        if not np.all(np.isfinite(wl)) or not np.all(np.isfinite(p)):
            raise InvalidSpd("samples must be finite")
        if np.any(p < 0):
            raise InvalidSpd("power must be non-negative")
        if wl[0] < WAVELENGTH_MIN_NM or wl[-1] > WAVELENGTH_MAX_NM:
            raise InvalidSpd(
                f"wavelengths must lie within [{WAVELENGTH_MIN_NM:.0f}, {WAVELENGTH_MAX_NM:.0f}] nm"
            )
        wl.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "wavelengths_nm", wl)
        object.__setattr__(self, "power", p)

    @classmethod
    def from_pairs(
        cls,
        samples: Iterable[tuple[float, float]],
        meta: Mapping[str, object] | None = None,
    ) -> "SpectralPowerDistribution":
        pairs = list(samples)
        wl = np.array([s[0] for s in pairs], dtype=float)
        p = np.array([s[1] for s in pairs], dtype=float)
        return cls(wl, p, meta or {})

    def support(self) -> tuple[float, float]:
        """First and last sampled wavelength; power is zero outside."""
        return float(self.wavelengths_nm[0]), float(self.wavelengths_nm[-1])

    def resample(self, grid_nm: np.ndarray) -> np.ndarray:
        """Linearly interpolate power onto ``grid_nm``, zero outside the support."""
        return np.interp(grid_nm, self.wavelengths_nm, self.power, left=0.0, right=0.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpectralPowerDistribution):
            return NotImplemented
        return np.array_equal(self.wavelengths_nm, other.wavelengths_nm) and np.array_equal(
            self.power, other.power
        )

    def __hash__(self) -> int:
        return hash((self.wavelengths_nm.tobytes(), self.power.tobytes()))


def monochromatic_line(
    wavelength_nm: float, power: float = 1.0, half_width_nm: float = 5.0
) -> SpectralPowerDistribution:
    """Narrow triangular line centred on ``wavelength_nm``.

    With the default half width of one CMF grid step and a centre on the grid,
    the rectangle-rule integration sees exactly one nonzero sample, which makes
    this the canonical probe for the spectral locus.
    """
    if half_width_nm <= 0:
        raise InvalidSpd("half_width_nm must be positive")
    return SpectralPowerDistribution(
        np.array([wavelength_nm - half_width_nm, wavelength_nm, wavelength_nm + half_width_nm]),
        np.array([0.0, power, 0.0]),
    )
