/** Segment hit-testing in canvas pixel space.
 *
 * Normalized [0,1]^2 geometry (y up) is mapped into a square canvas with a
 * margin; clicks select the unique segment within tolerance.  When two or
 * more segments are within tolerance the click is ambiguous and selects
 * nothing (the caller flashes the contenders instead).
 */

import type { Segment } from "./types";

export const HIT_TOLERANCE_PX = 6;

export interface Viewport {
  size: number; // canvas is size x size pixels
  margin: number;
}

export function toCanvas(
  p: [number, number],
  vp: Viewport,
): [number, number] {
  const scale = vp.size - 2 * vp.margin;
  // flip y: normalized coordinates grow upward, canvas pixels grow downward
  return [vp.margin + p[0] * scale, vp.size - vp.margin - p[1] * scale];
}

export function pointSegmentDistance(
  p: [number, number],
  a: [number, number],
  b: [number, number],
): number {
  const abx = b[0] - a[0];
  const aby = b[1] - a[1];
  const apx = p[0] - a[0];
  const apy = p[1] - a[1];
  const len2 = abx * abx + aby * aby;
  const t = len2 === 0 ? 0 : Math.max(0, Math.min(1, (apx * abx + apy * aby) / len2));
  const dx = apx - t * abx;
  const dy = apy - t * aby;
  return Math.hypot(dx, dy);
}

export type HitResult =
  | { kind: "hit"; index: number }
  | { kind: "ambiguous"; indices: number[] }
  | { kind: "miss" };

export function hitTest(
  segments: Segment[],
  point: [number, number],
  vp: Viewport,
  tolerance: number = HIT_TOLERANCE_PX,
): HitResult {
  const within: number[] = [];
  segments.forEach((seg, i) => {
    const d = pointSegmentDistance(
      point,
      toCanvas(seg.start, vp),
      toCanvas(seg.end, vp),
    );
    if (d <= tolerance) within.push(i);
  });
  if (within.length === 1) return { kind: "hit", index: within[0]! };
  if (within.length > 1) return { kind: "ambiguous", indices: within };
  return { kind: "miss" };
}
