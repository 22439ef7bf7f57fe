// Canvas drawing for the trial disc and the aggregate chart.  All geometry
// comes from layout.ts; this file only issues 2D-context calls.

import { glyphStrokes, pickGlyph } from "./glyphs.js";
import { chartGeometry, discLayout } from "./layout.js";
import type { AggregateRow } from "./types.js";

export function drawTrial(
  canvas: HTMLCanvasElement,
  positions: [number, number][],
  trialIndex: number,
  glyphMode: boolean,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const size = canvas.width;
  const { disc, dots } = discLayout(positions, size);
  ctx.clearRect(0, 0, size, size);

  ctx.strokeStyle = "#888";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc(disc.x, disc.y, disc.r, 0, 2 * Math.PI);
  ctx.stroke();

  ctx.fillStyle = "#111";
  ctx.strokeStyle = "#111";
  ctx.lineWidth = Math.max(2, disc.r * 0.02);
  dots.forEach((dot, i) => {
    if (!glyphMode) {
      ctx.beginPath();
      ctx.arc(dot.x, dot.y, dot.r, 0, 2 * Math.PI);
      ctx.fill();
      return;
    }
    const kind = pickGlyph(trialIndex, i);
    if (kind === "o") {
      ctx.beginPath();
      ctx.arc(dot.x, dot.y, dot.r, 0, 2 * Math.PI);
      ctx.stroke();
      return;
    }
    ctx.beginPath();
    for (const stroke of glyphStrokes(kind, dot.r)) {
      ctx.moveTo(dot.x + stroke.from[0], dot.y + stroke.from[1]);
      ctx.lineTo(dot.x + stroke.to[0], dot.y + stroke.to[1]);
    }
    ctx.stroke();
  });
}

export function drawAggregate(canvas: HTMLCanvasElement, rows: AggregateRow[]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const geo = chartGeometry(rows, width, height);
  if (!geo) {
    ctx.fillStyle = "#666";
    ctx.font = "16px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText("no sessions recorded yet", width / 2, height / 2);
    return;
  }

  ctx.strokeStyle = "#ccc";
  ctx.fillStyle = "#666";
  ctx.font = "12px sans-serif";
  ctx.textAlign = "center";
  for (const t of geo.yTicks) {
    ctx.beginPath();
    ctx.moveTo(30, t.y);
    ctx.lineTo(width - 10, t.y);
    ctx.stroke();
    ctx.fillText(t.value.toFixed(1), 16, t.y + 4);
  }
  for (const t of geo.xTicks) {
    ctx.fillText(String(t.label), t.x, height - 12);
  }

  const series: [string, { x: number; y: number }[]][] = [
    ["#c33", geo.theoretical],
    ["#36c", geo.measured],
  ];
  for (const [color, points] of series) {
    ctx.strokeStyle = color;
    ctx.fillStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    points.forEach((p, i) => (i === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
    ctx.stroke();
    for (const p of points) {
      ctx.beginPath();
      ctx.arc(p.x, p.y, 3, 0, 2 * Math.PI);
      ctx.fill();
    }
  }
  ctx.fillStyle = "#c33";
  ctx.textAlign = "left";
  ctx.fillText("theoretical", width - 110, 20);
  ctx.fillStyle = "#36c";
  ctx.fillText("measured", width - 110, 36);
}
