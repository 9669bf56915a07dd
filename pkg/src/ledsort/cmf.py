"""Standard-observer colour matching functions.

The two CIE observers (1931 2-degree, 1964 10-degree) are embedded as
plain-text tables at a uniform 5 nm grid over 380-780 nm and loaded once at
import of the accessor. Alternative tables can be loaded from a path with the
same column layout (wavelength_nm, xbar, ybar, zbar).
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np


class Observer(enum.Enum):
    CIE1931_2deg = "CIE1931_2deg"
    CIE1964_10deg = "CIE1964_10deg"


_DATA_FILES = {
    Observer.CIE1931_2deg: "cie1931_2deg_5nm.txt",
    Observer.CIE1964_10deg: "cie1964_10deg_5nm.txt",
}


class InvalidCmfTable(ValueError):
    """Table violates the CMF invariants (grid, sign or shape)."""


@dataclass(frozen=True)
class CmfTable:
    """Sensitivity of a standard observer per wavelength on a uniform grid."""

    observer: Observer
    wavelengths_nm: np.ndarray
    xbar: np.ndarray
    ybar: np.ndarray
    zbar: np.ndarray

    def __post_init__(self) -> None:
        wl = np.asarray(self.wavelengths_nm, dtype=float)
        bars = []
        for name in ("xbar", "ybar", "zbar"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != wl.shape:
                raise InvalidCmfTable(f"{name} length does not match the wavelength grid")
            if np.any(arr < 0):
                raise InvalidCmfTable(f"{name} must be non-negative everywhere")
            bars.append(arr)
        if wl.ndim != 1 or wl.size < 2:
            raise InvalidCmfTable("grid must be a 1-d array with at least 2 wavelengths")
        steps = np.diff(wl)
        if not np.all(steps > 0) or not np.allclose(steps, steps[0], rtol=0, atol=1e-9):
            raise InvalidCmfTable("grid step must be uniform and positive")
        for name, arr in zip(("wavelengths_nm", "xbar", "ybar", "zbar"), [wl] + bars):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def step_nm(self) -> float:
        return float(self.wavelengths_nm[1] - self.wavelengths_nm[0])

    def index_of(self, wavelength_nm: float) -> int:
        """Index of an exact grid wavelength; raises KeyError if off-grid."""
        idx = int(np.searchsorted(self.wavelengths_nm, wavelength_nm))
        if idx >= self.wavelengths_nm.size or self.wavelengths_nm[idx] != wavelength_nm:
            raise KeyError(f"{wavelength_nm} nm is not on the CMF grid")
        return idx


def load_cmf_table(path: str | Path, observer: Observer) -> CmfTable:
    """Load a CMF table from a whitespace-separated text file.

    Rows are ``wavelength_nm xbar ybar zbar``; ``#`` starts a comment.
    """
    data = np.loadtxt(path)
    if data.ndim != 2 or data.shape[1] != 4:
        raise InvalidCmfTable(f"{path}: expected 4 columns (wavelength, xbar, ybar, zbar)")
    return CmfTable(observer, data[:, 0], data[:, 1], data[:, 2], data[:, 3])


@functools.lru_cache(maxsize=None)
def cmf_table(observer: Observer = Observer.CIE1931_2deg) -> CmfTable:
    """The embedded table for ``observer``."""
    ref = resources.files("ledsort.data").joinpath(_DATA_FILES[observer])
    with resources.as_file(ref) as path:
        return load_cmf_table(path, observer)
