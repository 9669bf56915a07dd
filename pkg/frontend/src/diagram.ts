/**
 * Canvas rendering of the chromaticity diagram: spectral locus backdrop,
 * bin outlines, MacAdam ellipses and arriving measurement points. Pure
 * presentation; all data comes from the service's plot bundle and the
 * telemetry-fed view model.
 */

import type { MeasurementEvent, PlotBundle } from "./protocol.js";

export interface Viewport {
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
}

export const FULL_DIAGRAM: Viewport = { minX: -0.05, minY: -0.05, maxX: 0.8, maxY: 0.9 };

/** Viewport tightly framing the screen's bins (with margin), else the full diagram. */
export function screenViewport(bundle: PlotBundle | null, margin = 0.012): Viewport {
  if (!bundle || bundle.bins.length === 0) return FULL_DIAGRAM;
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const bin of bundle.bins) {
    for (const [x, y] of bin.outline) {
      minX = Math.min(minX, x);
      minY = Math.min(minY, y);
      maxX = Math.max(maxX, x);
      maxY = Math.max(maxY, y);
    }
  }
  return { minX: minX - margin, minY: minY - margin, maxX: maxX + margin, maxY: maxY + margin };
}

const BIN_PALETTE = [
  "#4e9a06", "#204a87", "#a40000", "#c4a000", "#5c3566",
  "#ce5c00", "#2e8b8b", "#8f5902", "#4b6983", "#6b8e23",
];

export function binColor(binId: string): string {
  let hash = 0;
  for (let i = 0; i < binId.length; i++) {
    hash = (hash * 31 + binId.charCodeAt(i)) >>> 0;
  }
  return BIN_PALETTE[hash % BIN_PALETTE.length] ?? "#444444";
}

function centroid(outline: [number, number][]): [number, number] {
  let sx = 0;
  let sy = 0;
  for (const [x, y] of outline) {
    sx += x;
    sy += y;
  }
  return [sx / outline.length, sy / outline.length];
}

export class DiagramRenderer {
  ellipseScale = 10; // presentation-only magnification of the 1-step outlines

  constructor(private readonly canvas: HTMLCanvasElement) {}

  private toPixel(vp: Viewport, x: number, y: number): [number, number] {
    const { width, height } = this.canvas;
    const px = ((x - vp.minX) / (vp.maxX - vp.minX)) * width;
    const py = height - ((y - vp.minY) / (vp.maxY - vp.minY)) * height;
    return [px, py];
  }

  render(
    bundle: PlotBundle | null,
    points: readonly MeasurementEvent[],
    viewport: Viewport,
  ): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#fdfdf8";
    ctx.fillRect(0, 0, width, height);
    if (!bundle) return;

    // spectral locus, closed across the purple line
    ctx.strokeStyle = "#888888";
    ctx.lineWidth = 1.25;
    ctx.beginPath();
    bundle.locus.forEach((p, i) => {
      const [px, py] = this.toPixel(viewport, p.x, p.y);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.closePath();
    ctx.stroke();

    // MacAdam ellipses, magnified for visibility
    ctx.strokeStyle = "#b8a0c8";
    ctx.lineWidth = 1;
    for (const outline of bundle.ellipses) {
      if (outline.length === 0) continue;
      const [cx, cy] = centroid(outline);
      ctx.beginPath();
      outline.forEach(([x, y], i) => {
        const sx = cx + (x - cx) * this.ellipseScale;
        const sy = cy + (y - cy) * this.ellipseScale;
        const [px, py] = this.toPixel(viewport, sx, sy);
        if (i === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      });
      ctx.closePath();
      ctx.stroke();
    }

    // bins
    ctx.lineWidth = 1.5;
    ctx.font = "11px sans-serif";
    for (const bin of bundle.bins) {
      ctx.strokeStyle = binColor(bin.id);
      ctx.beginPath();
      bin.outline.forEach(([x, y], i) => {
        const [px, py] = this.toPixel(viewport, x, y);
        if (i === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      });
      ctx.closePath();
      ctx.stroke();
      const [cx, cy] = centroid(bin.outline);
      const [px, py] = this.toPixel(viewport, cx, cy);
      ctx.fillStyle = binColor(bin.id);
      ctx.globalAlpha = 0.6;
      ctx.fillText(bin.id, px + 3, py - 3);
      ctx.globalAlpha = 1;
    }

    // measured points: bin-coloured dots, rejects crossed out in red
    for (const point of points) {
      const [px, py] = this.toPixel(viewport, point.x, point.y);
      if (point.reject) {
        ctx.strokeStyle = "#cc0000";
        ctx.lineWidth = 1.5;
        ctx.beginPath();
        ctx.moveTo(px - 3.5, py - 3.5);
        ctx.lineTo(px + 3.5, py + 3.5);
        ctx.moveTo(px - 3.5, py + 3.5);
        ctx.lineTo(px + 3.5, py - 3.5);
        ctx.stroke();
      } else {
        ctx.fillStyle = binColor(point.chroma_bin);
        ctx.beginPath();
        ctx.arc(px, py, 2.5, 0, 2 * Math.PI);
        ctx.fill();
      }
    }
  }
}
