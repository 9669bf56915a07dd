"""MacAdam ellipses and the ellipse-normalised colour difference ("steps").

The embedded dataset is the classic 25-ellipse table measured by MacAdam in
1942, stored as configuration data (centres, semi-axes, major-axis angle) and
overridable by path. One step equals one ellipse radius: a colour difference
of k <= 1 is indistinguishable to the standard observer at that point of the
diagram.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .colorimetry import ChromaticityXY

_DATA_FILE = "macadam1942_ellipses.txt"


@dataclass(frozen=True)
class MacAdamEllipse:
    """Perceptual-indistinguishability region around a chromaticity point."""

    center: ChromaticityXY
    semi_major: float
    semi_minor: float
    theta: float  # major-axis angle, radians, in [0, pi)

    def __post_init__(self) -> None:
        if not (self.semi_major >= self.semi_minor > 0):
            raise ValueError("semi-axes must satisfy a >= b > 0")
        if not (0 <= self.theta < math.pi):
            raise ValueError("theta must lie in [0, pi)")

    @property
    def area(self) -> float:
        return math.pi * self.semi_major * self.semi_minor

    def translated(self, center: ChromaticityXY) -> "MacAdamEllipse":
        return MacAdamEllipse(center, self.semi_major, self.semi_minor, self.theta)

    def boundary_point(self, angle: float, k: float = 1.0) -> tuple[float, float]:
        """Point on the k-scaled boundary at parametric ``angle``."""
        ct, st = math.cos(self.theta), math.sin(self.theta)
        ca, sa = math.cos(angle), math.sin(angle)
        dx = k * (self.semi_major * ca * ct - self.semi_minor * sa * st)
        dy = k * (self.semi_major * ca * st + self.semi_minor * sa * ct)
        return (self.center.x + dx, self.center.y + dy)


def _normalised_radius(e: MacAdamEllipse, dx: float, dy: float) -> float:
    # Project the offset onto the ellipse axes and scale each by its semi-axis.
    ct, st = math.cos(e.theta), math.sin(e.theta)
    along = (dx * ct + dy * st) / e.semi_major
    across = (-dx * st + dy * ct) / e.semi_minor
    return math.hypot(along, across)


def in_ellipse(p: ChromaticityXY, e: MacAdamEllipse, k: float) -> bool:
    """Whether ``p`` lies within the ellipse scaled by ``k``; the boundary counts.

    Membership is closed, with an ulp-scale relative guard so points
    constructed exactly on the boundary do not fall out by rounding.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    radius = _normalised_radius(e, p.x - e.center.x, p.y - e.center.y)
    return radius <= k * (1.0 + 1e-12)


def nearest_ellipse(p: ChromaticityXY, ellipses: Sequence[MacAdamEllipse]) -> MacAdamEllipse:
    """The ellipse whose centre is Euclidean-nearest to ``p`` (first wins ties)."""
    if not ellipses:
        raise ValueError("ellipse list must be non-empty")
    best = ellipses[0]
    best_d = (best.center.x - p.x) ** 2 + (best.center.y - p.y) ** 2
    for e in ellipses[1:]:
        d = (e.center.x - p.x) ** 2 + (e.center.y - p.y) ** 2
        if d < best_d:
            best, best_d = e, d
    return best


def macadam_steps(
    p: ChromaticityXY, q: ChromaticityXY, ellipses: Sequence[MacAdamEllipse]
) -> float:
    """Colour difference from ``p`` to ``q`` in local ellipse radii.

    The ellipse with the centre nearest to ``p`` is translated to ``p``
    (nearest-centre interpolation); the result is the smallest scale factor k
    at which the translated ellipse contains ``q``.
    """
    e = nearest_ellipse(p, ellipses)
    return _normalised_radius(e, q.x - p.x, q.y - p.y)


def load_ellipses(path: str | Path) -> tuple[MacAdamEllipse, ...]:
    """Load ellipses from a text table: center_x center_y a b theta_deg."""
    data = np.atleast_2d(np.loadtxt(path))
    if data.shape[1] != 5:
        raise ValueError(f"{path}: expected 5 columns (cx, cy, a, b, theta_deg)")
    out = []
    for cx, cy, a, b, theta_deg in data:
        out.append(
            MacAdamEllipse(ChromaticityXY(cx, cy), float(a), float(b), math.radians(theta_deg))
        )
    return tuple(out)


@functools.lru_cache(maxsize=1)
def macadam_1942_ellipses() -> tuple[MacAdamEllipse, ...]:
    """The embedded 25-ellipse dataset."""
    ref = resources.files("ledsort.data").joinpath(_DATA_FILE)
    with resources.as_file(ref) as path:
        return load_ellipses(path)
