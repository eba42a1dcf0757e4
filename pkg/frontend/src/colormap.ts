/**
 * Grayscale error scale shared by every figure: 0 error renders black,
 * 100% error or worse renders white, linear in between.  All panels use
 * the same fixed scale so shades are comparable across figures.
 */

export function errorToGray(err: number, lo = 0.0, hi = 1.0): number {
  if (!(hi > lo)) {
    throw new Error("scale limits must satisfy hi > lo");
  }
  const t = Math.min(Math.max((err - lo) / (hi - lo), 0), 1);
  return Math.round(t * 255);
}

/** Map an arbitrary intensity range to gray (used for image panels). */
export function intensityToGray(v: number, lo: number, hi: number): number {
  if (hi === lo) {
    return 0;
  }
  const t = Math.min(Math.max((v - lo) / (hi - lo), 0), 1);
  return Math.round(t * 255);
}
