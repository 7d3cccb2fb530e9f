/**
 * Ternary plot geometry: the exact affine maps between barycentric weights
 * and canvas pixels, plus the heatmap sampler.
 *
 * Vertex layout follows the usual weight-simplex picture: w1 (least-squares
 * fit) bottom-left, w2 (L1 penalty) bottom-right, w3 (L2 penalty) top. The
 * bottom edge is then the lasso path and the left edge the ridge path.
 */

import { clampToSimplex } from "./convert";
import { ClientModel, evaluateCoordinate } from "./model";

export interface Triangle {
  x1: number; y1: number; // vertex of w1 (OLS)
  x2: number; y2: number; // vertex of w2 (L1-only)
  x3: number; y3: number; // vertex of w3 (L2-only)
}

export function defaultTriangle(width: number, height: number, margin = 40): Triangle {
  return {
    x1: margin, y1: height - margin,
    x2: width - margin, y2: height - margin,
    x3: width / 2, y3: margin,
  };
}

export function barycentricToPixel(tri: Triangle, w: number[]): [number, number] {
  return [
    w[0] * tri.x1 + w[1] * tri.x2 + w[2] * tri.x3,
    w[0] * tri.y1 + w[1] * tri.y2 + w[2] * tri.y3,
  ];
}

/** Exact affine inversion of the triangle, then clamp-and-renormalize. */
export function pixelToBarycentric(tri: Triangle, x: number, y: number): number[] {
  const det = (tri.y2 - tri.y3) * (tri.x1 - tri.x3) + (tri.x3 - tri.x2) * (tri.y1 - tri.y3);
  const w1 = ((tri.y2 - tri.y3) * (x - tri.x3) + (tri.x3 - tri.x2) * (y - tri.y3)) / det;
  const w2 = ((tri.y3 - tri.y1) * (x - tri.x3) + (tri.x1 - tri.x3) * (y - tri.y3)) / det;
  return clampToSimplex([w1, w2, 1 - w1 - w2]);
}

export interface HeatmapCell {
  x: number;
  y: number;
  value: number;
}

/**
 * Sample one output coordinate of the model on a pixel grid over the
 * triangle. Cells whose center falls outside (beyond a half-cell skirt) are
 * skipped; the rest are clamped onto the simplex before evaluation.
 */
export function sampleHeatmap(
  model: ClientModel,
  tri: Triangle,
  column: number,
  resolution: number,
): { cells: HeatmapCell[]; min: number; max: number; cellW: number; cellH: number } {
  const minX = Math.min(tri.x1, tri.x2, tri.x3);
  const maxX = Math.max(tri.x1, tri.x2, tri.x3);
  const minY = Math.min(tri.y1, tri.y2, tri.y3);
  const maxY = Math.max(tri.y1, tri.y2, tri.y3);
  const cellW = (maxX - minX) / resolution;
  const cellH = (maxY - minY) / resolution;
  const det = (tri.y2 - tri.y3) * (tri.x1 - tri.x3) + (tri.x3 - tri.x2) * (tri.y1 - tri.y3);
  const skirt = -0.75 / resolution;

  const cells: HeatmapCell[] = [];
  let min = Infinity;
  let max = -Infinity;
  for (let i = 0; i < resolution; i++) {
    for (let j = 0; j < resolution; j++) {
      const x = minX + (i + 0.5) * cellW;
      const y = minY + (j + 0.5) * cellH;
      const w1 = ((tri.y2 - tri.y3) * (x - tri.x3) + (tri.x3 - tri.x2) * (y - tri.y3)) / det;
      const w2 = ((tri.y3 - tri.y1) * (x - tri.x3) + (tri.x1 - tri.x3) * (y - tri.y3)) / det;
      const w3 = 1 - w1 - w2;
      if (w1 < skirt || w2 < skirt || w3 < skirt) continue;
      const value = evaluateCoordinate(model, clampToSimplex([w1, w2, w3]), column);
      if (value < min) min = value;
      if (value > max) max = value;
      cells.push({ x: x - cellW / 2, y: y - cellH / 2, value });
    }
  }
  return { cells, min, max, cellW, cellH };
}

/** Linear blue-to-yellow color ramp for heatmap cells. */
export function rampColor(value: number, min: number, max: number): string {
  const t = max > min ? (value - min) / (max - min) : 0.5;
  const r = Math.round(40 + t * 215);
  const g = Math.round(60 + t * 170);
  const b = Math.round(140 - t * 100);
  return `rgb(${r},${g},${b})`;
}
