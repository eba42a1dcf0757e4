/**
 * Side-by-side image panels (truth / reconstruction comparisons) from
 * flattened (index, value) vector CSVs of square images.  All panels share
 * the intensity scale of the first image so differences are visible.
 */

import { GrayCanvas } from "./png";
import { Table, numericColumn } from "./csv";
import { intensityToGray } from "./colormap";

const GAP = 4;

export function renderTomoPanel(tables: Table[], paths: string[],
                                pixelScale = 4): GrayCanvas {
  if (tables.length === 0) {
    throw new Error("tomo_panel needs at least one image CSV");
  }
  const images = tables.map((t, i) => {
    const vals = numericColumn(t, "value", paths[i]);
    const side = Math.round(Math.sqrt(vals.length));
    if (side * side !== vals.length) {
      throw new Error(`${paths[i]}: expected a flattened square image`);
    }
    return { vals, side };
  });
  const side = images[0].side;
  if (!images.every((img) => img.side === side)) {
    throw new Error("tomo_panel images must share one size");
  }
  const lo = Math.min(...images[0].vals);
  const hi = Math.max(...images[0].vals);
  const px = side * pixelScale;
  const canvas = new GrayCanvas(images.length * px + GAP * (images.length - 1),
                                px, 255);
  images.forEach((img, k) => {
    const left = k * (px + GAP);
    for (let r = 0; r < side; r++) {
      for (let c = 0; c < side; c++) {
        const g = intensityToGray(img.vals[r * side + c], lo, hi);
        canvas.fillRect(left + c * pixelScale, r * pixelScale,
                        pixelScale, pixelScale, g);
      }
    }
  });
  return canvas;
}
