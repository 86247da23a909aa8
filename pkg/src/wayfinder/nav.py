"""Point-goal planning on the inflated occupancy grid and path execution."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import ndimage

from . import _kernels
from .mapping import OccupancyGrid
from .world.motion import DEFAULT_FOOTPRINT, step_motion
from .world.types import ClockCosts, Pose, Scenario, wrap_angle

INFLATION_MARGIN = 0.05
DEFAULT_INFLATION = DEFAULT_FOOTPRINT + INFLATION_MARGIN
GOAL_SNAP_RADIUS = 0.5
STANDOFF = {"door": 1.0, "person": 1.5, "sign": 1.2}
STANDOFF_FALLBACK_RADIUS = 2.0


class PlanningError(Exception):
    pass


class Unreachable(PlanningError):
    pass


class StartInObstacle(PlanningError):
    pass


class NoStandoff(Unreachable):
    pass


@dataclass(frozen=True)
class Path:
    waypoints: tuple[tuple[float, float], ...]
    length: float
    cells: tuple[tuple[int, int], ...] = ()

    @property
    def goal(self) -> tuple[float, float]:
        return self.waypoints[-1]


def passable_cells(grid: OccupancyGrid, mask: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(grid.free & ~np.asarray(mask, dtype=bool))


def _nearest_cell(ok: np.ndarray, grid: OccupancyGrid, x: float, y: float, radius: float):
    """Passable cell whose centre is nearest (x, y) within ``radius``; ties by (iy, ix)."""
    res = grid.resolution
    ox, oy = grid.origin
    r = int(math.ceil(radius / res)) + 1
    cx, cy = grid.cell_of(x, y)
    h, w = ok.shape
    x0, x1 = max(cx - r, 0), min(cx + r, w - 1)
    y0, y1 = max(cy - r, 0), min(cy + r, h - 1)
    if x0 > x1 or y0 > y1:
        return None
    sub = ok[y0 : y1 + 1, x0 : x1 + 1]
    iy, ix = np.nonzero(sub)
    if iy.size == 0:
        return None
    px = ox + (ix + x0 + 0.5) * res
    py = oy + (iy + y0 + 0.5) * res
    d = np.hypot(px - x, py - y)
    keep = d <= radius + 1e-9
    if not keep.any():
        return None
    order = np.lexsort((ix[keep], iy[keep], np.round(d[keep], 9)))
    k = order[0]
    return (int(ix[keep][k] + x0), int(iy[keep][k] + y0))


def plan_path(
    grid: OccupancyGrid,
    mask: np.ndarray,
    start,
    goal,
    snap_goal: float = GOAL_SNAP_RADIUS,
    snap_start: float = 0.0,
) -> Path:
    """Minimum-cost 8-connected path between two world points.

    Only free cells outside ``mask`` are traversable; unknown cells are not.
    A blocked goal is moved to the nearest traversable cell within
    ``snap_goal``.  ``snap_start`` does the same for the start, which helps
    when new obstacles have inflated over the robot's current cell.
    """
    ok = passable_cells(grid, mask)
    sx, sy = (start.x, start.y) if isinstance(start, Pose) else start
    gx, gy = goal
    s = grid.cell_of(sx, sy)
    if not (grid.in_bounds(*s) and ok[s[1], s[0]]):
        s = _nearest_cell(ok, grid, sx, sy, snap_start) if snap_start > 0 else None
        if s is None:
            raise StartInObstacle(f"start ({sx:.2f}, {sy:.2f}) is not in free, uninflated space")
    g = grid.cell_of(gx, gy)
    if not (grid.in_bounds(*g) and ok[g[1], g[0]]):
        g = _nearest_cell(ok, grid, gx, gy, snap_goal)
        if g is None:
            raise Unreachable(f"no free cell within {snap_goal} m of goal ({gx:.2f}, {gy:.2f})")
    cost, parent = _kernels.dijkstra(ok, s[0], s[1], g[0], g[1])
    if not math.isfinite(cost):
        raise Unreachable(f"goal ({gx:.2f}, {gy:.2f}) is not connected to the start")
    w = ok.shape[1]
    cells = []
    u = g[1] * w + g[0]
    while u != -1:
        cells.append((u % w, u // w))
        u = parent[u] if u != s[1] * w + s[0] else -1
    cells.reverse()
    pts = tuple(grid.center_of(ix, iy) for ix, iy in cells)
    length = sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(pts, pts[1:]))
    return Path(pts, length, tuple(cells))


def _corners(points):
    """Drop interior waypoints that continue in the same grid direction."""
    if len(points) <= 2:
        return list(points)
    out = [points[0]]
    for prev, cur, nxt in zip(points, points[1:], points[2:]):
        d1 = (round((cur[0] - prev[0]) * 1e6), round((cur[1] - prev[1]) * 1e6))
        d2 = (round((nxt[0] - cur[0]) * 1e6), round((nxt[1] - cur[1]) * 1e6))
        if d1 != d2:
            out.append(cur)
    out.append(points[-1])
    return out


@dataclass(frozen=True)
class FollowResult:
    pose: Pose
    distance: float
    elapsed: float
    collided: bool
    rotation: float = 0.0
    stopped: bool = False


def follow_path(
    pose: Pose,
    path: Path,
    clock_costs: ClockCosts,
    scenario: Scenario,
    final_yaw: float | None = None,
    radius: float = DEFAULT_FOOTPRINT,
    sense_every: float = 1.0,
    on_step: Callable[[Pose], bool | None] | None = None,
) -> FollowResult:
    """Drive waypoint to waypoint, rotating in place before each leg.

    Legs are cut into pieces of at most ``sense_every`` meters and
    ``on_step`` is called after each piece; a truthy return stops the robot
    there (``stopped=True``).  Motion also stops at the first collision with
    the ground-truth walls.
    """
    dist = 0.0
    rot = 0.0
    cur = pose
    for wx, wy in _corners(path.waypoints):
        dx, dy = wx - cur.x, wy - cur.y
        leg = math.hypot(dx, dy)
        if leg < 1e-9:
            continue
        turn = wrap_angle(math.atan2(dy, dx) - cur.yaw)
        rot += abs(turn)
        cur, _ = step_motion(cur, (0.0, turn), scenario, radius)
        pieces = max(1, int(math.ceil(leg / sense_every - 1e-9)))
        step = leg / pieces
        for k in range(pieces):
            nxt, hit = step_motion(cur, (step, 0.0), scenario, radius)
            if hit:
                elapsed = dist / clock_costs.linear_speed + rot / clock_costs.angular_speed
                return FollowResult(cur, dist, elapsed, True, rot)
            cur = nxt
            dist += step
            if on_step is not None and on_step(cur):
                elapsed = dist / clock_costs.linear_speed + rot / clock_costs.angular_speed
                return FollowResult(cur, dist, elapsed, False, rot, stopped=True)
        # snap exactly onto the waypoint to stop drift accumulating
        cur = Pose(wx, wy, cur.yaw)
    if final_yaw is not None:
        turn = wrap_angle(final_yaw - cur.yaw)
        rot += abs(turn)
        cur = Pose(cur.x, cur.y, cur.yaw + turn)
    elapsed = dist / clock_costs.linear_speed + rot / clock_costs.angular_speed
    return FollowResult(cur, dist, elapsed, False, rot)


def reachable_from(grid: OccupancyGrid, mask: np.ndarray, x: float, y: float) -> np.ndarray:
    """Cells connected to (x, y) under the planner's move rules.

    Diagonal moves need both orthogonal neighbours traversable, so
    connectivity is exactly 4-connectivity.
    """
    ok = passable_cells(grid, mask)
    ix, iy = grid.cell_of(x, y)
    if not (grid.in_bounds(ix, iy) and ok[iy, ix]):
        return np.zeros(ok.shape, dtype=bool)
    labels, _ = ndimage.label(ok)
    return labels == labels[iy, ix]


def standoff_pose(
    grid: OccupancyGrid,
    mask: np.ndarray,
    position,
    approach_yaw: float,
    distance: float,
    reachable: np.ndarray | None = None,
    fallback_radius: float = STANDOFF_FALLBACK_RADIUS,
    same_side: bool = True,
) -> Pose:
    """Pose ``distance`` out along ``approach_yaw`` from ``position``, facing it.

    When that cell is blocked (or not in ``reachable``) the nearest allowed
    cell within ``fallback_radius`` of the landmark is used instead; with
    ``same_side`` only cells in front of the landmark qualify.
    """
    lx, ly = position
    ok = passable_cells(grid, mask)
    if reachable is not None:
        ok &= reachable
    tx = lx + distance * math.cos(approach_yaw)
    ty = ly + distance * math.sin(approach_yaw)
    c = grid.cell_of(tx, ty)
    if not (grid.in_bounds(*c) and ok[c[1], c[0]]):
        allowed = ok.copy()
        h, w = ok.shape
        ox, oy = grid.origin
        res = grid.resolution
        xs = ox + (np.arange(w) + 0.5) * res
        ys = oy + (np.arange(h) + 0.5) * res
        gx, gy = np.meshgrid(xs, ys)
        allowed &= np.hypot(gx - lx, gy - ly) <= fallback_radius + 1e-9
        if same_side:
            allowed &= (gx - lx) * math.cos(approach_yaw) + (gy - ly) * math.sin(approach_yaw) > 0
        c = _nearest_cell(allowed, grid, tx, ty, fallback_radius + distance)
        if c is None:
            raise NoStandoff(f"no reachable standoff within {fallback_radius} m of ({lx:.2f}, {ly:.2f})")
    cx, cy = grid.center_of(*c)
    return Pose(cx, cy, math.atan2(ly - cy, lx - cx))


def path_cells_clear(path: Path, grid: OccupancyGrid, mask: np.ndarray) -> bool:
    ok = passable_cells(grid, mask)
    return all(grid.in_bounds(ix, iy) and ok[iy, ix] for ix, iy in path.cells)


def points_clear(grid: OccupancyGrid, points, inflation: float) -> bool:
    """Are all world ``points`` on free cells farther than ``inflation`` from any occupied cell?

    Agrees with ``passable_cells(grid, dilate_obstacles(grid, inflation))``
    at those points but only looks at the window around them.
    """
    if len(points) == 0:
        return True
    cells = np.array([grid.cell_of(x, y) for x, y in points])
    h, w = grid.shape
    if (cells < 0).any() or (cells[:, 0] >= w).any() or (cells[:, 1] >= h).any():
        return False
    if not grid.free[cells[:, 1], cells[:, 0]].all():
        return False
    r = inflation / grid.resolution + 1e-9
    m = int(math.ceil(r))
    x0, y0 = max(cells[:, 0].min() - m, 0), max(cells[:, 1].min() - m, 0)
    x1, y1 = min(cells[:, 0].max() + m, w - 1), min(cells[:, 1].max() + m, h - 1)
    oy, ox = np.nonzero(grid.occupied[y0 : y1 + 1, x0 : x1 + 1])
    if ox.size == 0:
        return True
    occ = np.column_stack([ox + x0, oy + y0]).astype(float)
    for chunk in np.array_split(cells.astype(float), max(1, len(cells) // 256)):
        d2 = ((chunk[:, None, :] - occ[None, :, :]) ** 2).sum(axis=2)
        if (d2 <= r * r).any():
            return False
    return True
