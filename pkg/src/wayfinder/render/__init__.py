"""Top-down landmark map rendering and image encoding."""
from .codec import decode_png, decode_ppm, encode_png, encode_ppm
from .font import draw_text, text_size
from .map_image import COLORS, LEGEND, MapImage, desaturate, encode_image, glyph_mask, render_map

__all__ = [
    "COLORS",
    "LEGEND",
    "MapImage",
    "decode_png",
    "decode_ppm",
    "desaturate",
    "draw_text",
    "encode_image",
    "encode_png",
    "encode_ppm",
    "glyph_mask",
    "render_map",
    "text_size",
]
