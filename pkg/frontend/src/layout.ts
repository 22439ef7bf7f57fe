// Pure geometry: mapping unit-disc dot positions and aggregate rows onto
// canvas pixels.  Kept free of DOM types so it is trivially testable.

import type { AggregateRow } from "./types.js";

export interface Dot {
  x: number;
  y: number;
  r: number;
}

/** Map unit-disc positions (|p| <= 1) onto a square canvas of side `size`. */
export function discLayout(
  positions: [number, number][],
  size: number,
  dotRadiusRatio = 0.05,
): { disc: Dot; dots: Dot[] } {
  const center = size / 2;
  const discR = 0.46 * size;
  const dots = positions.map(([x, y]) => ({
    x: center + x * discR,
    y: center + y * discR,
    r: dotRadiusRatio * discR,
  }));
  return { disc: { x: center, y: center, r: discR }, dots };
}

/** Positions for the ring of digit buttons 0..9 around the disc. */
export function ringLayout(size: number): { digit: number; x: number; y: number }[] {
  const center = size / 2;
  const ringR = 0.46 * size;
  return Array.from({ length: 10 }, (_, digit) => {
    const angle = (digit / 10) * 2 * Math.PI - Math.PI / 2;
    return {
      digit,
      x: center + ringR * Math.cos(angle),
      y: center + ringR * Math.sin(angle),
    };
  });
}

export interface ChartPoint {
  x: number;
  y: number;
  label: number;
  value: number;
}

export interface ChartGeometry {
  measured: ChartPoint[];
  theoretical: ChartPoint[];
  xTicks: { x: number; label: number }[];
  yTicks: { y: number; value: number }[];
}

/** Two polylines (measured, theoretical) over level labels, y growing up. */
export function chartGeometry(
  rows: AggregateRow[],
  width: number,
  height: number,
  pad = 36,
): ChartGeometry | null {
  if (rows.length === 0) return null;
  const labels = rows.map((r) => r.label);
  const lo = Math.min(...labels);
  const hi = Math.max(...labels);
  const maxY = Math.max(
    1,
    ...rows.map((r) => Math.max(r.measured, r.theoretical)),
  );
  const xOf = (label: number) =>
    hi === lo
      ? (width + pad) / 2
      : pad + ((label - lo) / (hi - lo)) * (width - 2 * pad);
  const yOf = (v: number) => height - pad - (v / maxY) * (height - 2 * pad);
  const point = (label: number, value: number): ChartPoint => ({
    x: xOf(label),
    y: yOf(value),
    label,
    value,
  });
  const yTickCount = 4;
  return {
    measured: rows.map((r) => point(r.label, r.measured)),
    theoretical: rows.map((r) => point(r.label, r.theoretical)),
    xTicks: labels.map((l) => ({ x: xOf(l), label: l })),
    yTicks: Array.from({ length: yTickCount + 1 }, (_, i) => {
      const value = (maxY * i) / yTickCount;
      return { y: yOf(value), value };
    }),
  };
}
