"""Simulated range scans and object detections."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from .types import CATEGORIES, DetectionEvent, Pose, Scenario, wrap_angle


class SensorError(RuntimeError):
    pass


@dataclass(frozen=True)
class Scan:
    """One planar range scan.  ``ranges`` holds +inf for rays that missed."""

    origin: tuple[float, float]
    angles: np.ndarray
    ranges: np.ndarray
    max_range: float

    def __iter__(self):
        for a, r in zip(self.angles, self.ranges):
            yield float(a), (float(r) if math.isfinite(r) else None)

    def __len__(self):
        return len(self.angles)


def raycast_scan(scenario: Scenario, pose: Pose, ray_count: int = 720, max_range: float = 8.0) -> Scan:
    if ray_count < 1:
        raise ValueError("ray_count must be >= 1")
    ix, iy = scenario.cell_of(pose.x, pose.y)
    if scenario.is_wall(ix, iy):
        raise SensorError(f"pose ({pose.x:.2f}, {pose.y:.2f}) is inside a wall")
    res = scenario.resolution
    angles = pose.yaw + np.arange(ray_count) * (2.0 * math.pi / ray_count)
    px = (pose.x - scenario.origin[0]) / res
    py = (pose.y - scenario.origin[1]) / res
    ranges = _kernels.cast_rays(scenario.walls, px, py, angles, max_range / res) * res
    return Scan((pose.x, pose.y), angles, ranges, float(max_range))


def line_of_sight(scenario: Scenario, ax: float, ay: float, bx: float, by: float, slack: float = 1e-6) -> bool:
    """True when no wall cell lies strictly between the two points."""
    dist = math.hypot(bx - ax, by - ay)
    if dist == 0.0:
        return True
    res = scenario.resolution
    ang = np.array([math.atan2(by - ay, bx - ax)])
    px = (ax - scenario.origin[0]) / res
    py = (ay - scenario.origin[1]) / res
    r = _kernels.cast_rays(scenario.walls, px, py, ang, dist / res)[0] * res
    return not (r < dist - slack)


@dataclass(frozen=True)
class Camera:
    fov: float = math.pi / 2
    range: float = 8.0
    label_range: float = 3.0
    pan: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.fov <= 2.0 * math.pi:
            raise ValueError("camera fov must lie in (0, 2*pi]")
        if self.range <= 0:
            raise ValueError("camera range must be positive")


@dataclass(frozen=True)
class DetectorModel:
    """Per-category distributions for synthesized detector output.

    True positives for doors and people draw confidence from [0.2, 0.9];
    labels and signs from [0.02, 0.2], so the downstream per-category
    thresholds reject a fraction of them.
    """

    confidence: dict = field(
        default_factory=lambda: {
            "door": (0.2, 0.9),
            "person": (0.2, 0.9),
            "directions sign": (0.02, 0.2),
            "room label": (0.02, 0.2),
        }
    )
    width: dict = field(
        default_factory=lambda: {
            "door": (0.8, 1.3),
            "person": (0.4, 0.7),
            "directions sign": (0.36, 0.49),
            "room label": (0.1, 0.3),
        }
    )
    height: dict = field(
        default_factory=lambda: {
            "door": (1.9, 2.2),
            "person": (1.5, 1.9),
            "directions sign": (0.22, 0.45),
            "room label": (0.05, 0.12),
        }
    )
    position_noise: float = 0.05
    clutter_rate: float = 0.0
    # entity sides visible within this many radians of the facing direction
    facing_window: float = math.radians(80)


def _entities(scenario: Scenario, category: str):
    """(id, x, y, facing_yaw or None, visible_interval or None) per ground-truth entity."""
    if category == "door":
        return [(d.id, d.x, d.y, d.yaw, None) for d in scenario.doors]
    if category == "person":
        return [(n.id, n.x, n.y, None, None) for n in scenario.npcs]
    if category == "directions sign":
        return [(s.id, s.x, s.y, s.facing_yaw, None) for s in scenario.signs]
    if category == "room label":
        out = []
        for d in scenario.doors:
            if d.label_text is None:
                continue
            lx, ly = d.label_position
            out.append((d.id, lx, ly, d.yaw, d.label_visible_from))
        return out
    raise ValueError(f"unknown detection category {category!r}")


def _in_interval(angle: float, lo: float, hi: float) -> bool:
    span = (hi - lo) % (2 * math.pi)
    return (angle - lo) % (2 * math.pi) <= span


def _visible(scenario, pose, cam, heading, ex, ey, facing, interval, max_range, window) -> bool:
    dist = math.hypot(ex - pose.x, ey - pose.y)
    if dist > max_range or dist < 1e-6:
        return False
    bearing = math.atan2(ey - pose.y, ex - pose.x)
    if abs(wrap_angle(bearing - heading)) > cam.fov / 2 + 1e-12:
        return False
    back = math.atan2(pose.y - ey, pose.x - ex)
    if interval is not None:
        if not _in_interval(back, interval[0], interval[1]):
            return False
    elif facing is not None and abs(wrap_angle(back - facing)) > window:
        return False
    return line_of_sight(scenario, pose.x, pose.y, ex, ey, slack=0.02)


def simulate_detections(
    scenario: Scenario,
    pose: Pose,
    camera: Camera,
    query: str,
    rng_seed,
    frame_index: int = 0,
    model: DetectorModel | None = None,
) -> list[DetectionEvent]:
    """Synthesize raw detector output for one query at one frame.

    ``rng_seed`` is anything ``numpy.random.default_rng`` accepts; the same
    seed and inputs always give the same events.
    """
    if query not in CATEGORIES:
        raise ValueError(f"unknown detection category {query!r}")
    model = model or DetectorModel()
    rng = np.random.default_rng(rng_seed)
    heading = pose.yaw + camera.pan
    max_range = camera.label_range if query == "room label" else camera.range
    events: list[DetectionEvent] = []

    def draw(entity_id, x, y, approach):
        lo, hi = model.confidence[query]
        conf = float(rng.uniform(lo, hi))
        bw = float(rng.uniform(*model.width[query]))
        bh = float(rng.uniform(*model.height[query]))
        nx, ny = rng.normal(0.0, model.position_noise, size=2)
        events.append(
            DetectionEvent(frame_index, query, conf, bw, bh, (x + float(nx), y + float(ny)), approach, entity_id)
        )

    for ent_id, ex, ey, facing, interval in _entities(scenario, query):
        if not _visible(scenario, pose, camera, heading, ex, ey, facing, interval, max_range, model.facing_window):
            continue
        approach = facing if facing is not None else math.atan2(pose.y - ey, pose.x - ex)
        draw(ent_id, ex, ey, wrap_angle(approach))

    if model.clutter_rate > 0 and query in ("directions sign", "room label", "door", "person"):
        if rng.random() < model.clutter_rate:
            spot = _clutter_spot(scenario, pose, camera, heading, max_range, rng, model)
            if spot is not None:
                draw(None, spot[0], spot[1], spot[2])
    return events


def _clutter_spot(scenario, pose, camera, heading, max_range, rng, model):
    visible = [
        p
        for p in scenario.posters
        if _visible(scenario, pose, camera, heading, p.x, p.y, p.yaw, None, max_range, model.facing_window)
    ]
    if visible:
        p = visible[int(rng.integers(len(visible)))]
        return (p.x, p.y, wrap_angle(p.yaw))
    # no poster in view: a random wall surface inside the field of view
    ang = heading + float(rng.uniform(-camera.fov / 2, camera.fov / 2))
    res = scenario.resolution
    px = (pose.x - scenario.origin[0]) / res
    py = (pose.y - scenario.origin[1]) / res
    r = _kernels.cast_rays(scenario.walls, px, py, np.array([ang]), max_range / res)[0] * res
    if not math.isfinite(r):
        return None
    r = max(r - 0.05, 0.0)
    return (pose.x + r * math.cos(ang), pose.y + r * math.sin(ang), wrap_angle(ang + math.pi))
