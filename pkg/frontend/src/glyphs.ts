// Glyph strokes for the optional glyph-mode rendering: X, O, +, S (square
// outline), mirroring the dataset stamps at display scale.

export type GlyphKind = "x" | "o" | "plus" | "s";

export const GLYPH_KINDS: GlyphKind[] = ["x", "o", "plus", "s"];

export interface Stroke {
  from: [number, number];
  to: [number, number];
}

/** Line segments for a glyph centered at the origin with half-extent r. */
export function glyphStrokes(kind: GlyphKind, r: number): Stroke[] {
  switch (kind) {
    case "x":
      return [
        { from: [-r, -r], to: [r, r] },
        { from: [-r, r], to: [r, -r] },
      ];
    case "plus":
      return [
        { from: [-r, 0], to: [r, 0] },
        { from: [0, -r], to: [0, r] },
      ];
    case "s":
      return [
        { from: [-r, -r], to: [r, -r] },
        { from: [r, -r], to: [r, r] },
        { from: [r, r], to: [-r, r] },
        { from: [-r, r], to: [-r, -r] },
      ];
    case "o":
      return []; // drawn as a circle, not strokes
  }
}

/** Deterministic glyph choice per (trial, dot) so re-renders are stable. */
export function pickGlyph(trialIndex: number, dotIndex: number): GlyphKind {
  let h = (Math.imul(trialIndex, 2654435761) + Math.imul(dotIndex, 40503)) >>> 0;
  h = (h ^ (h >>> 13)) >>> 0;
  h = Math.imul(h, 2246822519) >>> 0;
  h = (h ^ (h >>> 16)) >>> 0;
  return GLYPH_KINDS[h % GLYPH_KINDS.length];
}
