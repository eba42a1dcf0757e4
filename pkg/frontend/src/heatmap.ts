/**
 * (sparsity, measurement-count) error heatmap from a sweep CSV.
 *
 * Cells average the rrmse over trials for one method; sparsity increases
 * along x, measurement count along y (largest M at the top).  Black means
 * perfect recovery, white means 100% error or worse.
 */

import { GrayCanvas } from "./png";
import { Table, column, numericColumn } from "./csv";
import { errorToGray } from "./colormap";

export interface HeatmapOptions {
  method?: string;      // default: first method present
  cellSize?: number;    // pixels per cell
  scaleLo?: number;
  scaleHi?: number;
}

export function renderHeatmap(table: Table, path: string,
                              opts: HeatmapOptions = {}): GrayCanvas {
  const methods = column(table, "method", path);
  const wanted = opts.method ?? methods[0];
  const sVals = numericColumn(table, "s", path);
  const mVals = numericColumn(table, "M", path);
  const errs = numericColumn(table, "rrmse", path);

  const cells = new Map<string, number[]>();
  const sSet = new Set<number>();
  const mSet = new Set<number>();
  for (let i = 0; i < errs.length; i++) {
    if (methods[i] !== wanted) continue;
    sSet.add(sVals[i]);
    mSet.add(mVals[i]);
    const key = `${sVals[i]},${mVals[i]}`;
    const bucket = cells.get(key) ?? [];
    bucket.push(errs[i]);
    cells.set(key, bucket);
  }
  if (cells.size === 0) {
    throw new Error(`${path}: no rows for method '${wanted}'`);
  }
  const sAxis = [...sSet].sort((a, b) => a - b);
  const mAxis = [...mSet].sort((a, b) => b - a); // largest M on top
  const cell = opts.cellSize ?? 16;
  const canvas = new GrayCanvas(sAxis.length * cell, mAxis.length * cell);
  for (let row = 0; row < mAxis.length; row++) {
    for (let col = 0; col < sAxis.length; col++) {
      const bucket = cells.get(`${sAxis[col]},${mAxis[row]}`);
      if (!bucket) continue; // missing cell stays white
      const mean = bucket.reduce((a, b) => a + b, 0) / bucket.length;
      canvas.fillRect(col * cell, row * cell, cell, cell,
                      errorToGray(mean, opts.scaleLo, opts.scaleHi));
    }
  }
  return canvas;
}
