"""Chromaticity/luminance bin screens: construction, validation, classification.

A screen partitions a region of the chromaticity diagram into labelled convex
polygonal bins plus an ordered list of luminance classes. Generated screens
are axis-aligned rectangle grids, which is what datasheet-style selection
windows look like; hand-written screens may use arbitrary convex polygons.

Constructors only check structure (types, vertex counts, interval sanity);
full geometric validation lives in :func:`validate_screen` so that screens
read from operator-edited files produce diagnostics instead of tracebacks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .colorimetry import ChromaticityXY
from .cmf import Observer
from .ellipses import MacAdamEllipse, macadam_steps

# Reserved assignment label; never a bin id or luminance class label.
REJECT = "REJECT"


class OutOfGamutDomain(ValueError):
    """Requested grid has vertices outside the open chromaticity simplex."""


class NonRectangularBin(ValueError):
    """Refinement requires every bin to be an axis-aligned rectangle."""


@dataclass(frozen=True)
class Bin:
    """One labelled cell of a screen: a convex CCW polygon in (x, y)."""

    id: str
    polygon: tuple[ChromaticityXY, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("bin id must be non-empty")
        poly = tuple(self.polygon)
        if len(poly) < 3:
            raise ValueError(f"bin {self.id!r}: polygon needs at least 3 vertices")
        if not all(isinstance(v, ChromaticityXY) for v in poly):
            raise TypeError(f"bin {self.id!r}: vertices must be ChromaticityXY")
        object.__setattr__(self, "polygon", poly)

    def contains(self, x: float, y: float) -> bool:
        """Boundary-inclusive membership via half-plane tests (assumes CCW convex)."""
        poly = self.polygon
        n = len(poly)
        for i in range(n):
            a = poly[i]
            b = poly[(i + 1) % n]
            cross = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x)
            if cross < 0:
                return False
        return True

    def signed_area(self) -> float:
        poly = self.polygon
        acc = 0.0
        for i in range(len(poly)):
            a = poly[i]
            b = poly[(i + 1) % len(poly)]
            acc += a.x * b.y - b.x * a.y
        return 0.5 * acc

    def geometry_problems(self) -> list[str]:
        """Violations of the polygon invariants (convex, CCW, positive area)."""
        problems = []
        poly = self.polygon
        n = len(poly)
        for i in range(n):
            a, b = poly[i], poly[(i + 1) % n]
            if a.x == b.x and a.y == b.y:
                problems.append("repeated consecutive vertex")
                return problems
        if self.signed_area() <= 0:
            problems.append("vertices are not counter-clockwise with positive area")
            return problems
        for i in range(n):
            a, b, c = poly[i], poly[(i + 1) % n], poly[(i + 2) % n]
            cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
            if cross < 0:
                problems.append("polygon is not convex")
                break
        return problems

    def as_rectangle(self) -> tuple[float, float, float, float] | None:
        """(x0, y0, x1, y1) if this bin is an axis-aligned rectangle, else None."""
        poly = self.polygon
        if len(poly) != 4:
            return None
        xs = sorted({v.x for v in poly})
        ys = sorted({v.y for v in poly})
        if len(xs) != 2 or len(ys) != 2:
            return None
        corners = {(xs[0], ys[0]), (xs[1], ys[0]), (xs[1], ys[1]), (xs[0], ys[1])}
        if {(v.x, v.y) for v in poly} != corners:
            return None
        return (xs[0], ys[0], xs[1], ys[1])


@dataclass(frozen=True)
class LuminanceClass:
    """Half-open photometric interval [min_lumens, max_lumens)."""

    label: str
    min_lumens: float
    max_lumens: float

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("luminance class label must be non-empty")
        if not self.min_lumens < self.max_lumens:
            raise ValueError(f"class {self.label!r}: min must be below max")
        if self.min_lumens < 0:
            raise ValueError(f"class {self.label!r}: lumens cannot be negative")

    def contains(self, lumens: float) -> bool:
        return self.min_lumens <= lumens < self.max_lumens


#: Default single class covering every non-negative photometric value.
OPEN_LUMINANCE_CLASS = LuminanceClass("ALL", 0.0, math.inf)


@dataclass(frozen=True)
class BinScreen:
    """An ordered set of bins plus luminance classes; immutable once built."""

    bins: tuple[Bin, ...]
    luminance_classes: tuple[LuminanceClass, ...] = (OPEN_LUMINANCE_CLASS,)
    name: str = "screen"
    observer: Observer = Observer.CIE1931_2deg

    def __post_init__(self) -> None:
        object.__setattr__(self, "bins", tuple(self.bins))
        object.__setattr__(self, "luminance_classes", tuple(self.luminance_classes))

    def bin_ids(self) -> tuple[str, ...]:
        return tuple(b.id for b in self.bins)


@dataclass(frozen=True)
class BinAssignment:
    """Classification outcome; REJECT marks a miss on either axis."""

    chroma_bin: str
    lum_class: str

    @property
    def is_reject(self) -> bool:
        return self.chroma_bin == REJECT or self.lum_class == REJECT


@dataclass(frozen=True)
class Diagnostic:
    """One violated screen invariant."""

    code: str
    message: str
    subjects: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def build_grid_screen(
    x0: float,
    y0: float,
    dx: float,
    dy: float,
    nx: int,
    ny: int,
    luminance_classes: Sequence[LuminanceClass] = (OPEN_LUMINANCE_CLASS,),
    name: str = "grid",
    observer: Observer = Observer.CIE1931_2deg,
) -> BinScreen:
    """Rectangular nx-by-ny screen with cells of size dx-by-dy from (x0, y0).

    Bin ids are "R{row}C{col}" in row-major order. Adjacent cells share vertex
    values exactly, so boundary classification ties are bitwise reproducible.
    """
    if dx <= 0 or dy <= 0:
        raise ValueError("cell sizes must be positive")
    if nx < 1 or ny < 1:
        raise ValueError("cell counts must be at least 1")
    xs = [x0 + i * dx for i in range(nx + 1)]
    ys = [y0 + j * dy for j in range(ny + 1)]
    for gx in (xs[0], xs[-1]):
        for gy in (ys[0], ys[-1]):
            if gx <= 0 or gy <= 0 or gx + gy >= 1:
                raise OutOfGamutDomain(
                    f"grid corner ({gx:g}, {gy:g}) outside the chromaticity domain"
                )
    bins = []
    for row in range(ny):
        for col in range(nx):
            bins.append(
                Bin(
                    f"R{row}C{col}",
                    (
                        ChromaticityXY(xs[col], ys[row]),
                        ChromaticityXY(xs[col + 1], ys[row]),
                        ChromaticityXY(xs[col + 1], ys[row + 1]),
                        ChromaticityXY(xs[col], ys[row + 1]),
                    ),
                )
            )
    return BinScreen(tuple(bins), tuple(luminance_classes), name=name, observer=observer)


def refine_screen(s: BinScreen, factor: int) -> BinScreen:
    """Split every rectangular bin into factor x factor children.

    Child ids are "{parent}/{i}{j}" with i the row and j the column inside the
    parent; the union of the children is exactly the parent rectangle.
    """
    if factor < 2:
        raise ValueError("refinement factor must be at least 2")
    bins = []
    for parent in s.bins:
        rect = parent.as_rectangle()
        if rect is None:
            raise NonRectangularBin(f"bin {parent.id!r} is not an axis-aligned rectangle")
        px0, py0, px1, py1 = rect
        xs = np.linspace(px0, px1, factor + 1)
        ys = np.linspace(py0, py1, factor + 1)
        for i in range(factor):
            for j in range(factor):
                bins.append(
                    Bin(
                        f"{parent.id}/{i}{j}",
                        (
                            ChromaticityXY(xs[j], ys[i]),
                            ChromaticityXY(xs[j + 1], ys[i]),
                            ChromaticityXY(xs[j + 1], ys[i + 1]),
                            ChromaticityXY(xs[j], ys[i + 1]),
                        ),
                    )
                )
    return BinScreen(tuple(bins), s.luminance_classes, name=f"{s.name}x{factor}", observer=s.observer)


def classify(p: ChromaticityXY, lumens: float, s: BinScreen) -> BinAssignment:
    """Assign a measured point to a chroma bin and a luminance class.

    Boundary points belong to the lowest-index bin containing them; misses on
    either axis map to REJECT.
    """
    chroma = REJECT
    for b in s.bins:
        if b.contains(p.x, p.y):
            chroma = b.id
            break
    lum = REJECT
    for c in s.luminance_classes:
        if c.contains(lumens):
            lum = c.label
            break
    return BinAssignment(chroma, lum)


def _projection_overlap(poly_a: Sequence[tuple[float, float]],
                        poly_b: Sequence[tuple[float, float]]) -> bool:
    """Separating-axis test: True iff the interiors overlap (touching is fine)."""
    for poly in (poly_a, poly_b):
        n = len(poly)
        for i in range(n):
            (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
            ax, ay = y1 - y2, x2 - x1
            pa = [ax * px + ay * py for px, py in poly_a]
            pb = [ax * px + ay * py for px, py in poly_b]
            lo = max(min(pa), min(pb))
            hi = min(max(pa), max(pb))
            span = max(max(pa) - min(pa), max(pb) - min(pb), 1e-300)
            if hi - lo <= 1e-12 * span:
                return False
    return True


def validate_screen(s: BinScreen) -> list[Diagnostic]:
    """All violated invariants of a screen; empty list means valid."""
    diags: list[Diagnostic] = []
    seen: set[str] = set()
    for b in s.bins:
        if b.id == REJECT:
            diags.append(Diagnostic("reserved-id", f"bin id {REJECT!r} is reserved", (b.id,)))
        if b.id in seen:
            diags.append(Diagnostic("duplicate-id", f"bin id {b.id!r} appears twice", (b.id,)))
        seen.add(b.id)
        for problem in b.geometry_problems():
            diags.append(Diagnostic("bad-polygon", f"bin {b.id!r}: {problem}", (b.id,)))
    healthy = [b for b in s.bins if not b.geometry_problems()]
    for i in range(len(healthy)):
        for j in range(i + 1, len(healthy)):
            a, b = healthy[i], healthy[j]
            pa = [(v.x, v.y) for v in a.polygon]
            pb = [(v.x, v.y) for v in b.polygon]
            if _projection_overlap(pa, pb):
                diags.append(
                    Diagnostic(
                        "overlap",
                        f"bins {a.id!r} and {b.id!r} have overlapping interiors",
                        (a.id, b.id),
                    )
                )
    classes = s.luminance_classes
    for i in range(1, len(classes)):
        prev, cur = classes[i - 1], classes[i]
        if cur.min_lumens < prev.max_lumens:
            overlapping = cur.max_lumens > prev.min_lumens
            diags.append(
                Diagnostic(
                    "lum-overlap" if overlapping else "lum-order",
                    f"luminance classes {prev.label!r} and {cur.label!r} are not ascending and disjoint",
                    (prev.label, cur.label),
                )
            )
    labels = [c.label for c in classes]
    for label in sorted({l for l in labels if labels.count(l) > 1 or l == REJECT}):
        code = "reserved-id" if label == REJECT else "duplicate-id"
        diags.append(Diagnostic(code, f"luminance class label {label!r} is not usable", (label,)))
    return diags


@dataclass(frozen=True)
class UniformityReport:
    """Per-bin worst-case colour difference across the bin, in MacAdam steps."""

    widths: dict[str, float]
    threshold: float
    flagged: tuple[str, ...] = field(default=())


def uniformity_report(
    s: BinScreen,
    ellipses: Sequence[MacAdamEllipse],
    threshold: float = 1.0,
) -> UniformityReport:
    """Worst vertex-to-vertex MacAdam step distance per bin.

    A bin wider than ``threshold`` steps (default one just-noticeable
    difference) can hold LEDs a standard observer would tell apart.
    """
    widths: dict[str, float] = {}
    for b in s.bins:
        worst = 0.0
        poly = b.polygon
        for i in range(len(poly)):
            for j in range(len(poly)):
                if i == j:
                    continue
                worst = max(worst, macadam_steps(poly[i], poly[j], ellipses))
        widths[b.id] = worst
    flagged = tuple(bid for bid, w in widths.items() if w > threshold)
    return UniformityReport(widths, threshold, flagged)


def screen_bounds(s: BinScreen) -> tuple[float, float, float, float]:
    """(min_x, min_y, max_x, max_y) over all bin vertices."""
    xs = [v.x for b in s.bins for v in b.polygon]
    ys = [v.y for b in s.bins for v in b.polygon]
    if not xs:
        raise ValueError("screen has no bins")
    return (min(xs), min(ys), max(xs), max(ys))
