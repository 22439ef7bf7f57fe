"""Pixel-grid construction: dot and glyph stamps, centering, canonical identity.

All images are binary rasters: background 0, foreground 255 (MNIST polarity).
Positions are (row, col) pairs.
"""

from dataclasses import dataclass
from enum import Enum

FOREGROUND = 255


class StampKind(Enum):
    DOT3 = "3x3"        # solid 3x3 block
    DOT1 = "1px"        # single pixel
    GLYPH_X = "x"
    GLYPH_O = "o"
    GLYPH_PLUS = "plus"
    GLYPH_S = "s"       # square outline


# Offsets relative to the stamp center, each within [-1, 1]^2.
STAMP_MASKS = {
    StampKind.DOT3: tuple((dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1)),
    StampKind.DOT1: ((0, 0),),
    StampKind.GLYPH_X: ((-1, -1), (-1, 1), (0, 0), (1, -1), (1, 1)),
    StampKind.GLYPH_O: ((-1, 0), (0, -1), (0, 1), (1, 0)),
    StampKind.GLYPH_PLUS: ((-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)),
    StampKind.GLYPH_S: tuple(
        (dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)
    ),
}

GLYPH_KINDS = (StampKind.GLYPH_X, StampKind.GLYPH_O, StampKind.GLYPH_PLUS, StampKind.GLYPH_S)


@dataclass(frozen=True)
class PixelGrid:
    """Rectangular grayscale raster, row-major, one byte per pixel."""

    width: int
    height: int
    data: bytes

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"non-positive grid shape {self.width}x{self.height}")
        if len(self.data) != self.width * self.height:
            raise ValueError(
                f"grid data holds {len(self.data)} bytes, "
                f"expected {self.width}*{self.height}={self.width * self.height}"
            )

    def pixel(self, row: int, col: int) -> int:
        return self.data[row * self.width + col]


def blank(width: int, height: int) -> PixelGrid:
    return PixelGrid(width, height, bytes(width * height))


def render(width, height, centers, stamp: StampKind, clip: bool = False) -> PixelGrid:
    """Stamp `stamp` at every center; overlapping stamps merge (set union).

    With clip=False every stamped pixel must land inside the grid; with
    clip=True off-grid pixels of border stamps are dropped.
    """
    mask = STAMP_MASKS[stamp]
    buf = bytearray(width * height)
    for r, c in centers:
        if not (0 <= r < height and 0 <= c < width):
            raise ValueError(f"center ({r}, {c}) outside {width}x{height} grid")
        for dr, dc in mask:
            rr, cc = r + dr, c + dc
            if 0 <= rr < height and 0 <= cc < width:
                buf[rr * width + cc] = FOREGROUND
            elif not clip:
                raise ValueError(
                    f"stamp at ({r}, {c}) spills to ({rr}, {cc}) outside "
                    f"{width}x{height} grid and clipping is off"
                )
    return PixelGrid(width, height, bytes(buf))


def render_glyphs(width, height, centers, kinds) -> PixelGrid:
    """Like render() but with a per-center glyph kind, always clipped."""
    buf = bytearray(width * height)
    for (r, c), kind in zip(centers, kinds):
        if not (0 <= r < height and 0 <= c < width):
            raise ValueError(f"center ({r}, {c}) outside {width}x{height} grid")
        for dr, dc in STAMP_MASKS[kind]:
            rr, cc = r + dr, c + dc
            if 0 <= rr < height and 0 <= cc < width:
                buf[rr * width + cc] = FOREGROUND
    return PixelGrid(width, height, bytes(buf))


def center_pattern(centers, width, height, stamp: StampKind):
    """Translate centers so the stamped pattern's bounding box is centered.

    When exact centering is impossible the pattern sits one pixel up/left of
    center (the shift is floored).  Relative positions are preserved.  An
    empty list is returned unchanged.
    """
    centers = list(centers)
    if not centers:
        return centers
    mask = STAMP_MASKS[stamp]
    rmin = min(r + dr for r, _ in centers for dr, _ in mask)
    rmax = max(r + dr for r, _ in centers for dr, _ in mask)
    cmin = min(c + dc for _, c in centers for _, dc in mask)
    cmax = max(c + dc for _, c in centers for _, dc in mask)
    shift_r = (height - (rmax - rmin + 1)) // 2 - rmin
    shift_c = (width - (cmax - cmin + 1)) // 2 - cmin
    return [(r + shift_r, c + shift_c) for r, c in centers]


def canonical_key(grid: PixelGrid):
    """Identity token: equal grids map to equal tokens and vice versa."""
    return (grid.width, grid.height, grid.data)


def foreground_positions(grid: PixelGrid):
    """(row, col) of every non-background pixel, row-major order."""
    w = grid.width
    return [divmod(i, w) for i, v in enumerate(grid.data) if v]


def foreground_count(grid: PixelGrid) -> int:
    return sum(1 for v in grid.data if v)


def to_pgm(grid: PixelGrid) -> bytes:
    """Binary PGM (P5) export for visual inspection."""
    return f"P5\n{grid.width} {grid.height}\n255\n".encode() + grid.data
