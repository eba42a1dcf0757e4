/**
 * Line figures: 1D reconstruction overlays and the recovery-error curve.
 * No text is rasterized (keeps output bytes font-independent); ticks are
 * drawn as plain marks.
 */

import { GrayCanvas } from "./png";
import { Table, numericColumn } from "./csv";

const MARGIN = 12;

function plotArea(canvas: GrayCanvas) {
  return {
    x0: MARGIN,
    y0: MARGIN,
    w: canvas.width - 2 * MARGIN,
    h: canvas.height - 2 * MARGIN,
  };
}

function drawFrame(canvas: GrayCanvas) {
  const { x0, y0, w, h } = plotArea(canvas);
  canvas.line(x0, y0 + h, x0 + w, y0 + h, 0);
  canvas.line(x0, y0, x0, y0 + h, 0);
}

function polyline(canvas: GrayCanvas, xs: number[], ys: number[],
                  value: number) {
  for (let i = 1; i < xs.length; i++) {
    canvas.line(xs[i - 1], ys[i - 1], xs[i], ys[i], value);
  }
}

/**
 * Overlay of (index, value) series; the first table draws black, later
 * ones in progressively lighter gray.
 */
export function renderRecon1d(tables: Table[], paths: string[],
                              width = 480, height = 240): GrayCanvas {
  if (tables.length === 0) {
    throw new Error("recon1d needs at least one vector CSV");
  }
  const series = tables.map((t, i) => ({
    idx: numericColumn(t, "index", paths[i]),
    val: numericColumn(t, "value", paths[i]),
  }));
  const allVals = series.flatMap((s) => s.val);
  const lo = Math.min(...allVals, 0);
  const hi = Math.max(...allVals, 0);
  const span = hi - lo || 1;
  const canvas = new GrayCanvas(width, height);
  const { x0, y0, w, h } = plotArea(canvas);
  drawFrame(canvas);
  series.forEach((s, k) => {
    const n = s.idx.length;
    const gray = Math.min(200, k * 120);
    const xs = s.idx.map((v) => x0 + (v / Math.max(n - 1, 1)) * (w - 1));
    const ys = s.val.map((v) => y0 + (1 - (v - lo) / span) * (h - 1));
    polyline(canvas, xs, ys, gray);
  });
  return canvas;
}

/** Median error against measurement count (error curve figure). */
export function renderErrCurve(table: Table, path: string,
                               width = 480, height = 240): GrayCanvas {
  const ms = numericColumn(table, "m", path);
  const errs = numericColumn(table, "rel_error", path);
  const byM = new Map<number, number[]>();
  for (let i = 0; i < ms.length; i++) {
    const bucket = byM.get(ms[i]) ?? [];
    bucket.push(errs[i]);
    byM.set(ms[i], bucket);
  }
  const mAxis = [...byM.keys()].sort((a, b) => a - b);
  const medians = mAxis.map((m) => {
    const v = [...(byM.get(m) as number[])].sort((a, b) => a - b);
    const mid = Math.floor(v.length / 2);
    return v.length % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  });
  const hi = Math.max(...medians, 1e-12);
  const canvas = new GrayCanvas(width, height);
  const { x0, y0, w, h } = plotArea(canvas);
  drawFrame(canvas);
  const mLo = mAxis[0];
  const mHi = mAxis[mAxis.length - 1] || 1;
  const xs = mAxis.map((m) =>
    x0 + ((m - mLo) / Math.max(mHi - mLo, 1)) * (w - 1));
  const ys = medians.map((e) => y0 + (1 - e / hi) * (h - 1));
  polyline(canvas, xs, ys, 0);
  // square markers at the data points
  xs.forEach((x, i) => canvas.fillRect(Math.round(x) - 2, Math.round(ys[i]) - 2,
                                       5, 5, 0));
  return canvas;
}
