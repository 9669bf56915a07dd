"""Render-free plot bundles: the data behind a chromaticity-diagram view.

A bundle carries the spectral locus polyline, sampled ellipse outlines, bin
outlines and measured points with their assignments, serialized as a single
deterministic JSON document for external renderers and the operator UI.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from .binning import BinScreen
from .cmf import Observer, cmf_table
from .colorimetry import Tristimulus, chromaticity
from .ellipses import MacAdamEllipse
from .linesim import SortReport

ELLIPSE_OUTLINE_POINTS = 64


@dataclass(frozen=True)
class PlotBundle:
    observer: Observer
    locus: tuple[tuple[float, float, float], ...]  # (wavelength_nm, x, y)
    ellipses: tuple[tuple[tuple[float, float], ...], ...]
    bins: tuple[tuple[str, tuple[tuple[float, float], ...]], ...]
    points: tuple[dict, ...] = field(default=())


def spectral_locus(observer: Observer = Observer.CIE1931_2deg) -> tuple[tuple[float, float, float], ...]:
    """Chromaticity of each grid wavelength's CMF triple."""
    t = cmf_table(observer)
    out = []
    for wl, xb, yb, zb in zip(t.wavelengths_nm, t.xbar, t.ybar, t.zbar):
        if xb + yb + zb <= 0:
            continue
        xy = chromaticity(Tristimulus(xb, yb, zb))
        out.append((float(wl), xy.x, xy.y))
    return tuple(out)


def ellipse_outline(
    e: MacAdamEllipse, k: float = 1.0, points: int = ELLIPSE_OUTLINE_POINTS
) -> tuple[tuple[float, float], ...]:
    return tuple(
        e.boundary_point(2.0 * math.pi * i / points, k) for i in range(points)
    )


def build_plot_bundle(
    screen: BinScreen | None = None,
    ellipses: Sequence[MacAdamEllipse] = (),
    report: SortReport | None = None,
    observer: Observer = Observer.CIE1931_2deg,
    ellipse_scale: float = 1.0,
) -> PlotBundle:
    bins = ()
    if screen is not None:
        observer = screen.observer
        bins = tuple(
            (b.id, tuple((v.x, v.y) for v in b.polygon)) for b in screen.bins
        )
    points = ()
    if report is not None:
        points = tuple(
            {
                "led_id": r.led_id,
                "x": r.x,
                "y": r.y,
                "lumens": r.lumens,
                "chroma_bin": r.assignment.chroma_bin,
                "lum_class": r.assignment.lum_class,
                "reject": r.assignment.is_reject,
            }
            for r in report.records
        )
    return PlotBundle(
        observer=observer,
        locus=spectral_locus(observer),
        ellipses=tuple(ellipse_outline(e, ellipse_scale) for e in ellipses),
        bins=bins,
        points=points,
    )


def bundle_to_json(bundle: PlotBundle) -> str:
    doc = {
        "v": 1,
        "observer": bundle.observer.name,
        "locus": [
            {"wavelength_nm": wl, "x": x, "y": y} for wl, x, y in bundle.locus
        ],
        "ellipses": [[[x, y] for x, y in outline] for outline in bundle.ellipses],
        "bins": [
            {"id": bin_id, "outline": [[x, y] for x, y in outline]}
            for bin_id, outline in bundle.bins
        ],
        "points": list(bundle.points),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
