"""Embedded 5x7 bitmap font: digits and the compass letters."""
from __future__ import annotations

import numpy as np

_GLYPHS = {
    "0": ("01110", "10001", "10011", "10101", "11001", "10001", "01110"),
    "1": ("00100", "01100", "00100", "00100", "00100", "00100", "01110"),
    "2": ("01110", "10001", "00001", "00010", "00100", "01000", "11111"),
    "3": ("11111", "00010", "00100", "00010", "00001", "10001", "01110"),
    "4": ("00010", "00110", "01010", "10010", "11111", "00010", "00010"),
    "5": ("11111", "10000", "11110", "00001", "00001", "10001", "01110"),
    "6": ("00110", "01000", "10000", "11110", "10001", "10001", "01110"),
    "7": ("11111", "00001", "00010", "00100", "01000", "01000", "01000"),
    "8": ("01110", "10001", "10001", "01110", "10001", "10001", "01110"),
    "9": ("01110", "10001", "10001", "01111", "00001", "00010", "01100"),
    "N": ("10001", "11001", "10101", "10011", "10001", "10001", "10001"),
    "S": ("01111", "10000", "10000", "01110", "00001", "00001", "11110"),
    "E": ("11111", "10000", "10000", "11110", "10000", "10000", "11111"),
    "W": ("10001", "10001", "10001", "10101", "10101", "10101", "01010"),
}

GLYPH_W, GLYPH_H = 5, 7
BITMAPS = {ch: np.array([[c == "1" for c in row] for row in rows], dtype=bool) for ch, rows in _GLYPHS.items()}


def text_size(text: str, scale: int = 1) -> tuple[int, int]:
    if not text:
        return (0, 0)
    return ((GLYPH_W + 1) * len(text) * scale - scale, GLYPH_H * scale)


def draw_text(pixels: np.ndarray, text: str, left: int, top: int, color, scale: int = 1) -> None:
    """Stamp ``text`` with its top-left corner at (left, top), clipped to the image."""
    h, w = pixels.shape[:2]
    x = left
    for ch in text:
        bm = np.kron(BITMAPS[ch], np.ones((scale, scale), dtype=bool))
        ys, xs = np.nonzero(bm)
        ys = ys + top
        xs = xs + x
        keep = (ys >= 0) & (ys < h) & (xs >= 0) & (xs < w)
        pixels[ys[keep], xs[keep]] = color
        x += (GLYPH_W + 1) * scale
