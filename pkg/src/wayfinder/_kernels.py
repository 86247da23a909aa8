"""Compiled inner loops: grid ray traversal and 8-connected Dijkstra.

All grids are indexed ``[iy, ix]``; world coordinates are converted by the
callers, which pass ``(px - ox) / res`` style cell-unit coordinates.
"""
from __future__ import annotations

import heapq
import math

import numba
import numpy as np

_INF = np.inf


@numba.njit(cache=True)
def _dda_setup(px, py, dx, dy):
    ix = int(math.floor(px))
    iy = int(math.floor(py))
    if dx > 0.0:
        sx = 1
        tmx = (ix + 1 - px) / dx
        tdx = 1.0 / dx
    elif dx < 0.0:
        sx = -1
        tmx = (ix - px) / dx
        tdx = -1.0 / dx
    else:
        sx = 0
        tmx = _INF
        tdx = _INF
    if dy > 0.0:
        sy = 1
        tmy = (iy + 1 - py) / dy
        tdy = 1.0 / dy
    elif dy < 0.0:
        sy = -1
        tmy = (iy - py) / dy
        tdy = -1.0 / dy
    else:
        sy = 0
        tmy = _INF
        tdy = _INF
    return ix, iy, sx, sy, tmx, tmy, tdx, tdy


@numba.njit(cache=True)
def cast_rays(walls, px, py, angles, max_range):
    """Distance (cell units) to the first wall cell boundary along each ray.

    Cells outside the grid count as walls.  Returns +inf for rays with no wall
    within ``max_range``.
    """
    h, w = walls.shape
    out = np.empty(angles.shape[0])
    for k in range(angles.shape[0]):
        dx = math.cos(angles[k])
        dy = math.sin(angles[k])
        ix, iy, sx, sy, tmx, tmy, tdx, tdy = _dda_setup(px, py, dx, dy)
        out[k] = _INF
        while True:
            if tmx < tmy:
                t = tmx
                ix += sx
                tmx += tdx
            else:
                t = tmy
                iy += sy
                tmy += tdy
            if t > max_range:
                break
            if ix < 0 or iy < 0 or ix >= w or iy >= h or walls[iy, ix]:
                out[k] = t
                break
    return out


@numba.njit(cache=True)
def trace_scan(shape_h, shape_w, px, py, angles, ranges, max_range, eps):
    """Cells crossed by each ray of a scan.

    Returns two boolean masks ``(free, hit)``.  A ray with finite range marks
    every cell it crosses before the hit as free and the cell entered at the
    hit distance as hit; a miss marks cells entered before ``max_range``.
    """
    free = np.zeros((shape_h, shape_w), dtype=np.bool_)
    hit = np.zeros((shape_h, shape_w), dtype=np.bool_)
    for k in range(angles.shape[0]):
        dx = math.cos(angles[k])
        dy = math.sin(angles[k])
        r = ranges[k]
        ix, iy, sx, sy, tmx, tmy, tdx, tdy = _dda_setup(px, py, dx, dy)
        if 0 <= ix < shape_w and 0 <= iy < shape_h:
            free[iy, ix] = True
        while True:
            if tmx < tmy:
                t = tmx
                ix += sx
                tmx += tdx
            else:
                t = tmy
                iy += sy
                tmy += tdy
            if ix < 0 or iy < 0 or ix >= shape_w or iy >= shape_h:
                break
            if math.isfinite(r):
                if t >= r - eps:
                    hit[iy, ix] = True
                    break
            elif t >= max_range:
                break
            free[iy, ix] = True
    return free, hit


_NBR = np.array(
    [[1, 0], [1, 1], [0, 1], [-1, 1], [-1, 0], [-1, -1], [0, -1], [1, -1]], dtype=np.int64
)


@numba.njit(cache=True)
def dijkstra(passable, sx, sy, gx, gy):
    """8-connected Dijkstra with straight cost 1 and diagonal cost sqrt(2).

    Diagonal moves need both orthogonal neighbours passable.  Neighbours are
    expanded in the fixed order E, NE, N, NW, W, SW, S, SE and equal-cost heap
    entries pop in insertion order, so the result is deterministic.  Returns
    ``(cost_to_goal, parent)`` with ``parent`` the flat predecessor index
    array (-1 for unreached); cost is +inf when the goal is unreachable.
    """
    h, w = passable.shape
    n = h * w
    dist = np.full(n, _INF)
    parent = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    s = sy * w + sx
    g = gy * w + gx
    dist[s] = 0.0
    seq = 0
    heap = [(0.0, seq, s)]
    diag = math.sqrt(2.0)
    while len(heap) > 0:
        d, _, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u == g:
            break
        ux = u % w
        uy = u // w
        for k in range(8):
            nx = ux + _NBR[k, 0]
            ny = uy + _NBR[k, 1]
            if nx < 0 or ny < 0 or nx >= w or ny >= h or not passable[ny, nx]:
                continue
            if k % 2 == 1:
                if not passable[uy, nx] or not passable[ny, ux]:
                    continue
                nd = d + diag
            else:
                nd = d + 1.0
            v = ny * w + nx
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                seq += 1
                heapq.heappush(heap, (nd, seq, v))
    return dist[g], parent
