"""Frontier waypoints: midpoints of obstacle-free explored/unknown boundary runs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mapping import OccupancyGrid, explored_contour

DEFAULT_MIN_SEGMENT = 0.5
_TIE = 1e-9


@dataclass(frozen=True)
class Frontier:
    midpoint: tuple[float, float]
    midpoint_cell: tuple[int, int]
    segment_length: float
    segment_cells: tuple[tuple[int, int], ...]


def path_positions(cells) -> list[float]:
    """Accumulated centre-to-centre distance (in cells) along a cell chain."""
    acc = [0.0]
    for (x0, y0), (x1, y1) in zip(cells, cells[1:]):
        acc.append(acc[-1] + math.hypot(x1 - x0, y1 - y0))
    return acc


def half_length_index(acc: list[float]) -> int:
    """Index of the cell nearest half the chain length; ties go to the lower index."""
    half = acc[-1] / 2.0
    best = min(abs(a - half) for a in acc)
    return next(i for i, a in enumerate(acc) if abs(a - half) <= best + _TIE)


def _runs(cells, breaks):
    """Maximal cyclic runs of non-break cells, each starting right after a break."""
    n = len(cells)
    if not any(breaks):
        return [list(cells)]
    first = breaks.index(True)
    runs, cur = [], []
    for k in range(1, n + 1):
        i = (first + k) % n
        if breaks[i]:
            if cur:
                runs.append(cur)
            cur = []
        else:
            cur.append(cells[i])
    if cur:
        runs.append(cur)
    return runs


def extract_frontiers(
    grid: OccupancyGrid, mask: np.ndarray, min_segment_length: float = DEFAULT_MIN_SEGMENT
) -> list[Frontier]:
    """Split explored-region contours at masked cells and return run midpoints.

    A cell already emitted earlier (a contour can touch the same cell twice
    around one-cell-wide features) also acts as a break, so no two frontiers
    share a cell.  Runs shorter than ``min_segment_length`` are dropped.
    Output is sorted by segment length, longest first, ties by midpoint
    (y, x) ascending.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != grid.shape:
        raise ValueError(f"mask shape {mask.shape} does not match grid shape {grid.shape}")
    res = grid.resolution
    seen: set[tuple[int, int]] = set()
    out: list[Frontier] = []
    for contour in explored_contour(grid):
        breaks = []
        for c in contour.cells:
            breaks.append(bool(mask[c[1], c[0]]) or c in seen)
            seen.add(c)
        for run in _runs(contour.cells, breaks):
            acc = path_positions(run)
            length = acc[-1] * res
            if length < min_segment_length - _TIE or length <= 0.0:
                continue
            mid = run[half_length_index(acc)]
            out.append(Frontier(grid.center_of(*mid), mid, length, tuple(run)))
    out.sort(key=lambda f: (-round(f.segment_length, 9), f.midpoint[1], f.midpoint[0]))
    return out
