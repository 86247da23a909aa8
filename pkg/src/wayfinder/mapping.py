"""Online occupancy grid, explored-region contours and obstacle dilation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from . import _kernels
from .world.sensors import Scan
from .world.types import Pose

UNKNOWN = -1
FREE = 0
OCCUPIED = 1

# a previously free cell needs this many hits before it flips to occupied
OCCUPIED_CONFIRM_HITS = 2
_GROW_PAD = 64


class OccupancyGrid:
    """Grid of {unknown, free, occupied} cells, stored ``cells[iy, ix]``.

    The origin always sits on the lattice ``base_origin + k * resolution`` so
    cells stay aligned with the world grid when the map grows.
    """

    def __init__(self, resolution: float, origin=(0.0, 0.0), shape=(1, 1)):
        if resolution <= 0:
            raise ValueError("resolution must be positive")
        self.resolution = float(resolution)
        self.base_origin = (float(origin[0]), float(origin[1]))
        self.offset = (0, 0)
        self.cells = np.full(shape, UNKNOWN, dtype=np.int8)
        self.hits = np.zeros(shape, dtype=np.uint8)

    @classmethod
    def around(cls, resolution: float, x: float, y: float, radius: float, lattice=(0.0, 0.0)):
        """Empty grid covering a square of ``radius`` around (x, y)."""
        g = cls(resolution, lattice, (1, 1))
        kx = int(math.floor((x - radius - lattice[0]) / resolution))
        ky = int(math.floor((y - radius - lattice[1]) / resolution))
        n = int(math.ceil(2 * radius / resolution)) + 2
        g.offset = (kx, ky)
        g.cells = np.full((n, n), UNKNOWN, dtype=np.int8)
        g.hits = np.zeros((n, n), dtype=np.uint8)
        return g

    @property
    def origin(self) -> tuple[float, float]:
        return (
            self.base_origin[0] + self.offset[0] * self.resolution,
            self.base_origin[1] + self.offset[1] * self.resolution,
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    def copy(self) -> "OccupancyGrid":
        g = OccupancyGrid.__new__(OccupancyGrid)
        g.resolution = self.resolution
        g.base_origin = self.base_origin
        g.offset = self.offset
        g.cells = self.cells.copy()
        g.hits = self.hits.copy()
        return g

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        ox, oy = self.origin
        return (int(math.floor((x - ox) / self.resolution)), int(math.floor((y - oy) / self.resolution)))

    def center_of(self, ix: int, iy: int) -> tuple[float, float]:
        ox, oy = self.origin
        return (ox + (ix + 0.5) * self.resolution, oy + (iy + 0.5) * self.resolution)

    def in_bounds(self, ix: int, iy: int) -> bool:
        h, w = self.cells.shape
        return 0 <= ix < w and 0 <= iy < h

    def state(self, ix: int, iy: int) -> int:
        return int(self.cells[iy, ix]) if self.in_bounds(ix, iy) else UNKNOWN

    @property
    def explored(self) -> np.ndarray:
        return self.cells != UNKNOWN

    @property
    def free(self) -> np.ndarray:
        return self.cells == FREE

    @property
    def occupied(self) -> np.ndarray:
        return self.cells == OCCUPIED

    def ensure_contains(self, xmin: float, ymin: float, xmax: float, ymax: float, pad: int = _GROW_PAD) -> None:
        """Grow (and re-origin) so the rectangle lies inside the grid."""
        x0, y0 = self.cell_of(xmin, ymin)
        x1, y1 = self.cell_of(xmax, ymax)
        h, w = self.cells.shape
        if x0 >= 0 and y0 >= 0 and x1 < w and y1 < h:
            return
        left = max(0, -x0 + pad) if x0 < 0 else 0
        bottom = max(0, -y0 + pad) if y0 < 0 else 0
        right = max(0, x1 - w + 1 + pad) if x1 >= w else 0
        top = max(0, y1 - h + 1 + pad) if y1 >= h else 0
        self.cells = np.pad(self.cells, ((bottom, top), (left, right)), constant_values=UNKNOWN)
        self.hits = np.pad(self.hits, ((bottom, top), (left, right)), constant_values=0)
        self.offset = (self.offset[0] - left, self.offset[1] - bottom)


def integrate_scan(grid: OccupancyGrid, pose: Pose, scan: Scan) -> OccupancyGrid:
    """Mark the cells crossed by each ray free and each hit cell occupied.

    Within one scan a cell that is both crossed and hit counts as hit.  Across
    scans the latest observation wins, except that a free cell only becomes
    occupied after ``OCCUPIED_CONFIRM_HITS`` hits.  Mutates and returns ``grid``.
    """
    finite = scan.ranges[np.isfinite(scan.ranges)]
    reach = max(scan.max_range, float(finite.max()) if finite.size else 0.0) + 2 * grid.resolution
    grid.ensure_contains(pose.x - reach, pose.y - reach, pose.x + reach, pose.y + reach)
    res = grid.resolution
    ox, oy = grid.origin
    h, w = grid.cells.shape
    free, hit = _kernels.trace_scan(
        h,
        w,
        (pose.x - ox) / res,
        (pose.y - oy) / res,
        np.ascontiguousarray(scan.angles, dtype=np.float64),
        np.ascontiguousarray(scan.ranges / res, dtype=np.float64),
        scan.max_range / res,
        1e-7,
    )
    free &= ~hit
    cells, hits = grid.cells, grid.hits
    hits[hit] = np.minimum(hits[hit].astype(np.int16) + 1, 255).astype(np.uint8)
    was_free = cells == FREE
    promote = hit & (~was_free | (hits >= OCCUPIED_CONFIRM_HITS))
    cells[promote] = OCCUPIED
    cells[free] = FREE
    hits[free] = 0
    return grid


def dilate_obstacles(grid: OccupancyGrid, radius: float) -> np.ndarray:
    """Cells whose centre lies within ``radius`` of an occupied cell centre."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    occ = grid.occupied
    if not occ.any():
        return np.zeros(occ.shape, dtype=bool)
    if radius == 0:
        return occ.copy()
    dist = ndimage.distance_transform_edt(~occ)
    return dist <= radius / grid.resolution + 1e-9


@dataclass(frozen=True)
class Contour:
    """Closed boundary of the explored region.

    ``vertices`` are cell-corner lattice points (ix, iy), one per boundary
    edge, traversed with the explored side on the left.  ``cells`` lists the
    explored cell behind each edge with consecutive repeats removed.
    """

    vertices: tuple[tuple[int, int], ...]
    cells: tuple[tuple[int, int], ...]
    is_hole: bool

    @property
    def edge_count(self) -> int:
        return len(self.vertices)


# direction -> (dx, dy); edge cells sit on the left of the travel direction
_E, _N, _W, _S = (1, 0), (0, 1), (-1, 0), (0, -1)


def _boundary_edges(explored: np.ndarray):
    """Directed boundary edges keyed by start vertex: {(vx, vy): [(dir, cell), ...]}."""
    pad = np.pad(explored, 1, constant_values=False)
    core = pad[1:-1, 1:-1]
    out: dict[tuple[int, int], list] = {}
    specs = (
        # neighbour slice, direction of travel, start-corner offset
        (pad[:-2, 1:-1], _E, (0, 0)),  # south neighbour unknown
        (pad[1:-1, 2:], _N, (1, 0)),  # east
        (pad[2:, 1:-1], _W, (1, 1)),  # north
        (pad[1:-1, :-2], _S, (0, 1)),  # west
    )
    for nbr, d, (cx, cy) in specs:
        iy, ix = np.nonzero(core & ~nbr)
        for x, y in zip(ix.tolist(), iy.tolist()):
            out.setdefault((x + cx, y + cy), []).append((d, (x, y)))
    return out


def explored_contour(grid: OccupancyGrid | np.ndarray) -> list[Contour]:
    """Trace the boundary between explored and unknown cells.

    Outside the grid counts as unknown.  At a vertex with two outgoing edges
    the left turn is taken, which keeps diagonally touching regions apart
    (4-connectivity).  Outer boundaries come first, then holes; within each
    group contours are ordered by their topmost-leftmost cell, which is also
    where each contour starts.
    """
    explored = grid.explored if isinstance(grid, OccupancyGrid) else np.asarray(grid, dtype=bool)
    edges = _boundary_edges(explored)
    used: set[tuple[tuple[int, int], tuple[int, int]]] = set()
    loops = []
    for start in sorted(edges, key=lambda v: (-v[1], v[0])):
        for d0, c0 in edges[start]:
            if (start, d0) in used:
                continue
            verts, cells = [], []
            v, d, c = start, d0, c0
            while True:
                used.add((v, d))
                verts.append(v)
                cells.append(c)
                v = (v[0] + d[0], v[1] + d[1])
                outs = edges[v]
                if len(outs) == 1:
                    pick = outs[0]
                else:
                    left = (-d[1], d[0])
                    pick = next((e for e in outs if e[0] == left), None)
                    if pick is None:
                        pick = next((e for e in outs if e[0] == d), outs[0])
                if (v, pick[0]) in used:
                    break
                d, c = pick
            loops.append((verts, cells))

    contours = []
    for verts, cells in loops:
        area2 = 0
        n = len(verts)
        for i in range(n):
            x0, y0 = verts[i]
            x1, y1 = verts[(i + 1) % n]
            area2 += x0 * y1 - x1 * y0
        # rotate so the contour starts at its topmost-leftmost cell
        k = min(range(n), key=lambda i: (-cells[i][1], cells[i][0], i))
        verts = verts[k:] + verts[:k]
        cells = cells[k:] + cells[:k]
        dedup = [cells[0]]
        for c in cells[1:]:
            if c != dedup[-1]:
                dedup.append(c)
        while len(dedup) > 1 and dedup[-1] == dedup[0]:
            dedup.pop()
        contours.append(Contour(tuple(verts), tuple(dedup), area2 < 0))
    contours.sort(key=lambda ct: (ct.is_hole, -ct.cells[0][1], ct.cells[0][0]))
    return contours


def export_pgm(grid: OccupancyGrid, path) -> tuple[Path, Path]:
    """Write a binary PGM (unknown 205, free 254, occupied 0) plus a metadata sidecar."""
    path = Path(path)
    img = np.full(grid.cells.shape, 205, dtype=np.uint8)
    img[grid.cells == FREE] = 254
    img[grid.cells == OCCUPIED] = 0
    img = img[::-1]  # north row first
    h, w = img.shape
    path.write_bytes(f"P5\n{w} {h}\n255\n".encode("ascii") + img.tobytes())
    meta = path.with_suffix(".yaml")
    ox, oy = grid.origin
    meta.write_text(
        f"image: {path.name}\nresolution: {grid.resolution}\norigin: [{ox!r}, {oy!r}, 0.0]\n"
        "occupied_value: 0\nfree_value: 254\nunknown_value: 205\n",
        encoding="ascii",
    )
    return path, meta


def load_pgm(path) -> OccupancyGrid:
    """Read a grid written by :func:`export_pgm`."""
    path = Path(path)
    data = path.read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h = map(int, parts[1].split())
    img = np.frombuffer(parts[3], dtype=np.uint8, count=w * h).reshape(h, w)[::-1]
    meta = {}
    for line in path.with_suffix(".yaml").read_text(encoding="ascii").splitlines():
        k, v = line.split(":", 1)
        meta[k.strip()] = v.strip()
    res = float(meta["resolution"])
    ox, oy, _ = (float(t) for t in meta["origin"].strip("[]").split(","))
    g = OccupancyGrid(res, (ox, oy), (h, w))
    g.cells[img == 254] = FREE
    g.cells[img == 0] = OCCUPIED
    return g
