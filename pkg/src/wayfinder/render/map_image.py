"""North-up landmark map: occupancy raster, compass border, glyphs and indices."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..mapping import FREE, OCCUPIED, OccupancyGrid
from ..memory import MemoryBank
from ..world.types import Pose
from .codec import encode_png, encode_ppm
from .font import draw_text, text_size

WIDTH = 640
BORDER = 24
PAD_M = 0.5
GLYPH_R = 6
DIGIT_SCALE = 2

UNKNOWN_RGB = (150, 150, 150)
FREE_RGB = (255, 255, 255)
OCCUPIED_RGB = (0, 0, 0)
BORDER_RGB = (225, 225, 225)
TEXT_RGB = (0, 0, 0)
COLORS = {
    "door": (139, 69, 19),
    "sign": (30, 80, 220),
    "person": (30, 160, 60),
    "frontier": (255, 140, 0),
    "robot": (220, 30, 30),
}
LEGEND = {
    "door": "brown square",
    "sign": "blue diamond",
    "person": "green disc",
    "frontier": "orange star",
    "robot": "red triangle",
}


@dataclass
class MapImage:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8
    scale: float  # pixels per meter
    bounds: tuple[float, float, float, float]  # xmin, ymin, xmax, ymax of the map area
    border: int = BORDER
    legend: dict = field(default_factory=lambda: dict(LEGEND))

    def world_to_pixel(self, x: float, y: float) -> tuple[float, float]:
        """Continuous (column, row) of a world point; rows grow southward."""
        x0, _, _, y1 = self.bounds
        return (self.border + (x - x0) * self.scale, self.border + (y1 - y) * self.scale)

    def pixel_to_world(self, col: float, row: float) -> tuple[float, float]:
        x0, _, _, y1 = self.bounds
        return (x0 + (col - self.border) / self.scale, y1 - (row - self.border) / self.scale)


def desaturate(rgb, amount: float = 0.5) -> tuple[int, int, int]:
    r, g, b = rgb
    gray = 0.299 * r + 0.587 * g + 0.114 * b
    return tuple(int(round(gray + (1.0 - amount) * (c - gray))) for c in rgb)


def _bounds(grid: OccupancyGrid, bank: MemoryBank, pose: Pose | None):
    iy, ix = np.nonzero(grid.explored)
    res = grid.resolution
    ox, oy = grid.origin
    xs, ys = [], []
    if iy.size:
        xs += [ox + ix.min() * res, ox + (ix.max() + 1) * res]
        ys += [oy + iy.min() * res, oy + (iy.max() + 1) * res]
    for lm in bank.landmarks.values():
        xs.append(lm.position[0])
        ys.append(lm.position[1])
    if pose is not None:
        xs.append(pose.x)
        ys.append(pose.y)
    if not xs:
        raise ValueError("nothing to render: the grid has no explored cells")
    return (min(xs) - PAD_M, min(ys) - PAD_M, max(xs) + PAD_M, max(ys) + PAD_M)


def _blit(pixels, mask, top, left, color):
    h, w = pixels.shape[:2]
    ys, xs = np.nonzero(mask)
    ys = ys + top
    xs = xs + left
    keep = (ys >= 0) & (ys < h) & (xs >= 0) & (xs < w)
    pixels[ys[keep], xs[keep]] = color


def _points_in_polygon(px, py, poly) -> np.ndarray:
    inside = np.zeros(px.shape, dtype=bool)
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        crosses = (y0 > py) != (y1 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
        inside ^= crosses & (px < xint)
    return inside


def glyph_mask(kind: str, r: int = GLYPH_R, yaw: float = 0.0) -> np.ndarray:
    """Boolean stamp of side 2r+1 centred on its middle pixel."""
    yy, xx = np.mgrid[-r : r + 1, -r : r + 1].astype(float)
    if kind == "door":
        return (np.abs(xx) <= r - 1) & (np.abs(yy) <= r - 1)
    if kind == "sign":
        return np.abs(xx) + np.abs(yy) <= r
    if kind == "person":
        return xx * xx + yy * yy <= r * r
    if kind == "frontier":
        pts = []
        for k in range(10):
            rad = r if k % 2 == 0 else r * 0.45
            a = math.pi / 2 + k * math.pi / 5
            pts.append((rad * math.cos(a), -rad * math.sin(a)))
        return _points_in_polygon(xx, yy, pts)
    if kind == "robot":
        pts = []
        for da, rad in ((0.0, r), (2.5, r), (-2.5, r)):
            a = yaw + da
            pts.append((rad * math.cos(a), -rad * math.sin(a)))
        return _points_in_polygon(xx, yy, pts)
    raise ValueError(f"unknown glyph {kind!r}")


def render_map(
    grid: OccupancyGrid,
    bank: MemoryBank,
    pose: Pose | None,
    width: int = WIDTH,
    trajectory=None,
) -> MapImage:
    """Draw the explored map cropped to what is known, North up.

    ``trajectory`` (a list of world points) is drawn as a thin polyline when
    given; prompts leave it out.
    """
    x0, y0, x1, y1 = _bounds(grid, bank, pose)
    inner_w = width - 2 * BORDER
    scale = inner_w / (x1 - x0)
    inner_h = max(1, int(math.ceil((y1 - y0) * scale)))
    height = inner_h + 2 * BORDER
    y1 = y0 + inner_h / scale
    pixels = np.empty((height, width, 3), dtype=np.uint8)
    pixels[:] = BORDER_RGB

    # occupancy raster, sampled at pixel centres
    cols = np.arange(inner_w) + 0.5
    rows = np.arange(inner_h) + 0.5
    wx = x0 + cols / scale
    wy = y1 - rows / scale
    ox, oy = grid.origin
    ix = np.floor((wx - ox) / grid.resolution).astype(np.int64)
    iy = np.floor((wy - oy) / grid.resolution).astype(np.int64)
    h, w = grid.shape
    okx = (ix >= 0) & (ix < w)
    oky = (iy >= 0) & (iy < h)
    states = np.full((inner_h, inner_w), -1, dtype=np.int8)
    sub = grid.cells[np.clip(iy, 0, h - 1)][:, np.clip(ix, 0, w - 1)]
    valid = oky[:, None] & okx[None, :]
    states[valid] = sub[valid]
    area = pixels[BORDER : BORDER + inner_h, BORDER : BORDER + inner_w]
    area[:] = UNKNOWN_RGB
    area[states == FREE] = FREE_RGB
    area[states == OCCUPIED] = OCCUPIED_RGB

    img = MapImage(width, height, pixels, scale, (x0, y0, x1, y1))

    if trajectory:
        for (ax, ay), (bx, by) in zip(trajectory, trajectory[1:]):
            c0, r0 = img.world_to_pixel(ax, ay)
            c1, r1 = img.world_to_pixel(bx, by)
            n = int(max(abs(c1 - c0), abs(r1 - r0))) + 1
            cs = np.linspace(c0, c1, n + 1).astype(int)
            rs = np.linspace(r0, r1, n + 1).astype(int)
            keep = (cs >= 0) & (cs < width) & (rs >= 0) & (rs < height)
            pixels[rs[keep], cs[keep]] = (120, 120, 255)

    # compass letters at the border midpoints
    tw, th = text_size("N", 2)
    draw_text(pixels, "N", (width - tw) // 2, (BORDER - th) // 2, TEXT_RGB, 2)
    draw_text(pixels, "S", (width - tw) // 2, height - BORDER + (BORDER - th) // 2, TEXT_RGB, 2)
    draw_text(pixels, "W", (BORDER - tw) // 2, (height - th) // 2, TEXT_RGB, 2)
    draw_text(pixels, "E", width - BORDER + (BORDER - tw) // 2, (height - th) // 2, TEXT_RGB, 2)

    for idx in sorted(bank.landmarks):
        lm = bank.landmarks[idx]
        kind = lm.category
        color = COLORS[kind]
        if lm.visited:
            color = desaturate(color)
        c, r = img.world_to_pixel(*lm.position)
        ci, ri = int(math.floor(c)), int(math.floor(r))
        _blit(pixels, glyph_mask(kind), ri - GLYPH_R, ci - GLYPH_R, color)
        label = str(idx)
        lw, lh = text_size(label, DIGIT_SCALE)
        left = min(max(ci - lw // 2, 0), width - lw)
        top = min(max(ri - GLYPH_R - 2 - lh, 0), height - lh)
        draw_text(pixels, label, left, top, TEXT_RGB, DIGIT_SCALE)

    if pose is not None:
        c, r = img.world_to_pixel(pose.x, pose.y)
        rr = GLYPH_R + 2
        _blit(pixels, glyph_mask("robot", rr, pose.yaw), int(math.floor(r)) - rr, int(math.floor(c)) - rr, COLORS["robot"])
    return img


def encode_image(image: MapImage | np.ndarray, fmt: str = "png") -> bytes:
    pixels = image.pixels if isinstance(image, MapImage) else image
    if fmt == "ppm":
        return encode_ppm(pixels)
    if fmt == "png":
        return encode_png(pixels)
    raise ValueError(f"unsupported image format {fmt!r}")

