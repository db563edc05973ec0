/** Canvas drawing: the segment figure, hover highlighting, and a
 * magnifier of the region under the cursor.
 *
 * Hover color announces the effect of a click: green when it would
 * activate the segment, red when it would deactivate it.  Ambiguous
 * clicks flash every contender.
 */

import { toCanvas, type Viewport } from "./geometry";
import type { Bitmap } from "./pbm";
import type { Segment } from "./types";

export const COLORS = {
  inert: "#8a8a8a",
  active: "#1a7f37", // activated segments draw thick and dark green
  hoverActivate: "#2ecc71",
  hoverDeactivate: "#e74c3c",
  flash: "#f1c40f",
  background: "#ffffff",
};

export interface DrawOptions {
  hoverIndex?: number | null;
  flashIndices?: number[];
  magnifyAt?: [number, number] | null; // cursor position, canvas pixels
}

export function viewportFor(canvas: HTMLCanvasElement): Viewport {
  return { size: canvas.width, margin: Math.round(canvas.width * 0.06) };
}

function strokeSegment(
  ctx: CanvasRenderingContext2D,
  seg: Segment,
  vp: Viewport,
  color: string,
  width: number,
): void {
  const a = toCanvas(seg.start, vp);
  const b = toCanvas(seg.end, vp);
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.lineCap = "round";
  ctx.beginPath();
  ctx.moveTo(a[0], a[1]);
  ctx.lineTo(b[0], b[1]);
  ctx.stroke();
}

export function drawTrial(
  canvas: HTMLCanvasElement,
  segments: Segment[],
  assignment: boolean[],
  opts: DrawOptions = {},
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const vp = viewportFor(canvas);
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  segments.forEach((seg, i) => {
    let color = assignment[i] ? COLORS.active : COLORS.inert;
    let width = assignment[i] ? 4 : 2;
    if (opts.flashIndices?.includes(i)) {
      color = COLORS.flash;
      width = 5;
    } else if (opts.hoverIndex === i) {
      color = assignment[i] ? COLORS.hoverDeactivate : COLORS.hoverActivate;
      width = 5;
    }
    strokeSegment(ctx, seg, vp, color, width);
  });
  if (opts.magnifyAt) drawMagnifier(ctx, canvas, opts.magnifyAt);
}

/** A circular 3x zoom of the area under the cursor, drawn top-right. */
function drawMagnifier(
  ctx: CanvasRenderingContext2D,
  canvas: HTMLCanvasElement,
  at: [number, number],
): void {
  const r = 48;
  const zoom = 3;
  const cx = canvas.width - r - 8;
  const cy = r + 8;
  ctx.save();
  ctx.beginPath();
  ctx.arc(cx, cy, r, 0, 2 * Math.PI);
  ctx.clip();
  ctx.drawImage(
    canvas,
    at[0] - r / zoom,
    at[1] - r / zoom,
    (2 * r) / zoom,
    (2 * r) / zoom,
    cx - r,
    cy - r,
    2 * r,
    2 * r,
  );
  ctx.restore();
  ctx.strokeStyle = "#333";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.arc(cx, cy, r, 0, 2 * Math.PI);
  ctx.stroke();
}

/** Blit a decoded bitmap (an observed step or a scored render). */
export function drawBitmap(canvas: HTMLCanvasElement, bmp: Bitmap): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  canvas.width = bmp.width;
  canvas.height = bmp.height;
  const img = ctx.createImageData(bmp.width, bmp.height);
  for (let i = 0; i < bmp.pixels.length; i++) {
    const v = bmp.pixels[i] ? 0 : 255;
    img.data[4 * i] = v;
    img.data[4 * i + 1] = v;
    img.data[4 * i + 2] = v;
    img.data[4 * i + 3] = 255;
  }
  ctx.putImageData(img, 0, 0);
}
