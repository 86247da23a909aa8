"""Robot kinematics against the ground-truth walls.

Walls are tested by their cell centres: a pose collides when any wall cell
centre lies closer than the footprint radius to the swept path.
"""
from __future__ import annotations

import math

import numpy as np

from .types import Pose, Scenario

DEFAULT_FOOTPRINT = 0.3


def _wall_centres_near(scenario: Scenario, x0, y0, x1, y1, margin):
    res = scenario.resolution
    ox, oy = scenario.origin
    h, w = scenario.grid.shape
    lo_x = int(math.floor((min(x0, x1) - margin - ox) / res)) - 1
    hi_x = int(math.floor((max(x0, x1) + margin - ox) / res)) + 1
    lo_y = int(math.floor((min(y0, y1) - margin - oy) / res)) - 1
    hi_y = int(math.floor((max(y0, y1) + margin - oy) / res)) + 1
    ix = np.arange(lo_x, hi_x + 1)
    iy = np.arange(lo_y, hi_y + 1)
    gx, gy = np.meshgrid(ix, iy)
    inside = (gx >= 0) & (gy >= 0) & (gx < w) & (gy < h)
    wall = np.ones(gx.shape, dtype=bool)
    wall[inside] = scenario.walls[gy[inside], gx[inside]]
    cx = ox + (gx[wall] + 0.5) * res
    cy = oy + (gy[wall] + 0.5) * res
    return cx, cy


def segment_clear(scenario: Scenario, x0, y0, x1, y1, radius: float = DEFAULT_FOOTPRINT) -> bool:
    """True when a disk of ``radius`` swept from (x0,y0) to (x1,y1) touches no wall."""
    cx, cy = _wall_centres_near(scenario, x0, y0, x1, y1, radius)
    if cx.size == 0:
        return True
    dx, dy = x1 - x0, y1 - y0
    seg2 = dx * dx + dy * dy
    if seg2 == 0.0:
        t = np.zeros_like(cx)
    else:
        t = np.clip(((cx - x0) * dx + (cy - y0) * dy) / seg2, 0.0, 1.0)
    d2 = (cx - (x0 + t * dx)) ** 2 + (cy - (y0 + t * dy)) ** 2
    return bool(np.all(d2 >= radius * radius))


def footprint_clear(scenario: Scenario, pose: Pose, radius: float = DEFAULT_FOOTPRINT) -> bool:
    return segment_clear(scenario, pose.x, pose.y, pose.x, pose.y, radius)


def step_motion(
    pose: Pose, command: tuple[float, float], scenario: Scenario, radius: float = DEFAULT_FOOTPRINT
) -> tuple[Pose, bool]:
    """Apply ``(linear m, angular rad)``: rotate in place, then drive straight.

    On collision the pose is returned unchanged with ``collision=True``.
    """
    linear, angular = command
    if not (math.isfinite(linear) and math.isfinite(angular)):
        raise ValueError("motion command must be finite")
    yaw = pose.yaw + angular
    nx = pose.x + linear * math.cos(yaw)
    ny = pose.y + linear * math.sin(yaw)
    if not segment_clear(scenario, pose.x, pose.y, nx, ny, radius):
        return pose, True
    return Pose(nx, ny, yaw), False
