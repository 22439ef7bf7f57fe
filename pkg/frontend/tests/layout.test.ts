import { describe, expect, it } from "vitest";

import { glyphStrokes, pickGlyph } from "../src/glyphs.js";
import { chartGeometry, discLayout, ringLayout } from "../src/layout.js";
import type { AggregateRow } from "../src/types.js";

describe("discLayout", () => {
  it("keeps every unit-disc position inside the drawn disc", () => {
    const positions: [number, number][] = [
      [0, 0], [0.9, 0], [-0.9, 0.3], [0.2, -0.95],
    ];
    const { disc, dots } = discLayout(positions, 400);
    for (const dot of dots) {
      const d = Math.hypot(dot.x - disc.x, dot.y - disc.y);
      expect(d).toBeLessThanOrEqual(disc.r + 1e-9);
    }
  });

  it("renders zero dots as an empty disc", () => {
    const { dots } = discLayout([], 400);
    expect(dots).toHaveLength(0);
  });

  it("scales linearly with canvas size", () => {
    const a = discLayout([[0.5, 0.5]], 200).dots[0];
    const b = discLayout([[0.5, 0.5]], 400).dots[0];
    expect(b.x).toBeCloseTo(2 * a.x);
    expect(b.r).toBeCloseTo(2 * a.r);
  });
});

describe("ringLayout", () => {
  it("places ten distinct digit buttons on the ring", () => {
    const spots = ringLayout(400);
    expect(spots.map((s) => s.digit)).toEqual([0, 1, 2, 3, 4, 5, 6, 7, 8, 9]);
    const center = 200;
    for (const s of spots) {
      expect(Math.hypot(s.x - center, s.y - center)).toBeCloseTo(0.46 * 400, 6);
    }
  });
});

describe("chartGeometry", () => {
  const rows: AggregateRow[] = [4, 5, 6, 7].map((label) => ({
    label,
    measured: (label - 2) / 2 - 0.3,
    measured_int: 0,
    theoretical: (label - 2) / 2,
    n: 10,
  }));

  it("returns null for an empty aggregate", () => {
    expect(chartGeometry([], 640, 360)).toBeNull();
  });

  it("plots the theoretical series exactly at (label-2)/2", () => {
    const geo = chartGeometry(rows, 640, 360)!;
    geo.theoretical.forEach((p, i) => {
      expect(p.value).toBe((rows[i].label - 2) / 2);
    });
  });

  it("keeps x strictly increasing and the measured line below theoretical", () => {
    const geo = chartGeometry(rows, 640, 360)!;
    for (let i = 1; i < geo.measured.length; i++) {
      expect(geo.measured[i].x).toBeGreaterThan(geo.measured[i - 1].x);
    }
    geo.measured.forEach((p, i) => {
      // canvas y grows downward, so a smaller value maps to a larger y
      expect(p.y).toBeGreaterThan(geo.theoretical[i].y);
    });
  });

  it("handles a single-label aggregate with one point per series", () => {
    const geo = chartGeometry(rows.slice(0, 1), 640, 360)!;
    expect(geo.measured).toHaveLength(1);
    expect(geo.theoretical).toHaveLength(1);
  });
});

describe("glyphs", () => {
  it("defines strokes for x, plus, and the square outline", () => {
    expect(glyphStrokes("x", 5)).toHaveLength(2);
    expect(glyphStrokes("plus", 5)).toHaveLength(2);
    expect(glyphStrokes("s", 5)).toHaveLength(4);
    expect(glyphStrokes("o", 5)).toHaveLength(0); // circle, not strokes
  });

  it("picks glyphs deterministically per trial and dot", () => {
    expect(pickGlyph(3, 1)).toBe(pickGlyph(3, 1));
    const kinds = new Set<string>();
    for (let t = 0; t < 40; t++) kinds.add(pickGlyph(t, t % 7));
    expect(kinds.size).toBe(4); // all four kinds appear
  });
});
