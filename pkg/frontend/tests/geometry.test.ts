import { describe, expect, it } from "vitest";

import {
  HIT_TOLERANCE_PX,
  hitTest,
  pointSegmentDistance,
  toCanvas,
  type Viewport,
} from "../src/geometry";
import type { Segment } from "../src/types";

const vp: Viewport = { size: 100, margin: 0 };

const seg = (id: number, start: [number, number], end: [number, number]): Segment =>
  ({ id, start, end });

describe("point-to-segment distance", () => {
  it("is the perpendicular distance inside the span", () => {
    expect(pointSegmentDistance([5, 3], [0, 0], [10, 0])).toBeCloseTo(3);
  });

  it("clamps to the nearest endpoint outside the span", () => {
    expect(pointSegmentDistance([14, 3], [0, 0], [10, 0])).toBeCloseTo(5);
  });

  it("handles degenerate zero-length segments", () => {
    expect(pointSegmentDistance([3, 4], [0, 0], [0, 0])).toBeCloseTo(5);
  });
});

describe("canvas mapping", () => {
  it("flips y so normalized up is screen up", () => {
    // normalized (0,0) is the bottom-left of the drawing area
    expect(toCanvas([0, 0], vp)).toEqual([0, 100]);
    expect(toCanvas([1, 1], vp)).toEqual([100, 0]);
  });

  it("respects the margin", () => {
    expect(toCanvas([0, 0], { size: 100, margin: 10 })).toEqual([10, 90]);
  });
});

describe("hit testing", () => {
  // horizontal segment along the canvas middle, vertical one at the right
  const segments = [
    seg(0, [0, 0.5], [1, 0.5]),
    seg(3, [0.9, 0], [0.9, 1]),
  ];

  it("selects the unique segment within tolerance", () => {
    const hit = hitTest(segments, [30, 50 + HIT_TOLERANCE_PX - 1], vp);
    expect(hit).toEqual({ kind: "hit", index: 0 });
  });

  it("misses beyond the tolerance", () => {
    const hit = hitTest(segments, [30, 50 + HIT_TOLERANCE_PX + 1], vp);
    expect(hit).toEqual({ kind: "miss" });
  });

  it("reports ambiguity near an intersection and toggles nothing", () => {
    const hit = hitTest(segments, [90, 50], vp);
    expect(hit.kind).toBe("ambiguous");
    if (hit.kind === "ambiguous") expect(hit.indices).toEqual([0, 1]);
  });

  it("uses a 6 px default tolerance", () => {
    expect(HIT_TOLERANCE_PX).toBe(6);
  });
});
