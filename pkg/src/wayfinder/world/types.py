"""Ground-truth building model types.

Frame convention: +x East, +y North, yaw in radians counter-clockwise from
East.  Grids are stored as ``cells[iy, ix]`` with row 0 at the southern edge,
so cell ``(ix, iy)`` covers ``[ox + ix*res, ox + (ix+1)*res)`` in x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FREE = 0
WALL = 1
DOOR = 2

RELATIVE_DIRECTIONS = ("left", "right", "forward", "backwards")
NPC_KINDS = ("doctor", "nurse", "patient", "generic")
CATEGORIES = ("door", "person", "directions sign", "room label")


def wrap_angle(a: float) -> float:
    """Normalize an angle to [-pi, pi)."""
    w = math.fmod(a + math.pi, 2.0 * math.pi)
    if w < 0.0:
        w += 2.0 * math.pi
    w -= math.pi
    # fmod can land exactly on +pi after the shift for inputs like -pi - 2k*pi
    if w >= math.pi:
        w -= 2.0 * math.pi
    return w


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    yaw: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))

    @property
    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)

    def distance_to(self, x: float, y: float) -> float:
        return math.hypot(x - self.x, y - self.y)

    def bearing_to(self, x: float, y: float) -> float:
        return math.atan2(y - self.y, x - self.x)


@dataclass(frozen=True)
class ClockCosts:
    linear_speed: float = 0.5
    angular_speed: float = 1.0
    scan_360: float = 6.0
    vlm_call: float = 10.0
    npc_exchange: float = 20.0

    def __post_init__(self):
        for name in ("linear_speed", "angular_speed", "scan_360", "vlm_call", "npc_exchange"):
            if not getattr(self, name) > 0:
                raise ValueError(f"clock cost {name} must be positive")


@dataclass(frozen=True)
class DoorSpec:
    """A doorway.  ``yaw`` is the outward normal on the labelled (corridor) side."""

    id: int
    x: float
    y: float
    yaw: float
    label_text: str | None = None
    # bearings (door -> viewer) from which the label can be seen, radians
    label_visible_from: tuple[float, float] | None = None

    def __post_init__(self):
        if self.label_text is not None and not self.label_text.strip():
            raise ValueError(f"door {self.id}: label_text must be nonempty when present")
        if self.label_visible_from is None:
            object.__setattr__(
                self, "label_visible_from", (self.yaw - math.radians(75), self.yaw + math.radians(75))
            )

    @property
    def label_position(self) -> tuple[float, float]:
        """Label plate: on the wall face, 0.8 m to the right of the door seen from the corridor."""
        nx, ny = math.cos(self.yaw), math.sin(self.yaw)
        # right-hand side for a viewer facing the door (heading = yaw + pi)
        rx, ry = -ny, nx
        return (self.x + 0.8 * rx + 0.15 * nx, self.y + 0.8 * ry + 0.15 * ny)


@dataclass(frozen=True)
class SignSpec:
    id: int
    x: float
    y: float
    facing_yaw: float
    entries: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError(f"sign {self.id}: entries must be nonempty")
        for rel, _ in self.entries:
            if rel not in RELATIVE_DIRECTIONS:
                raise ValueError(f"sign {self.id}: bad relative direction {rel!r}")

    def as_dict(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {k: [] for k in RELATIVE_DIRECTIONS}
        for rel, text in self.entries:
            out[rel].append(text)
        return out


@dataclass(frozen=True)
class NpcSpec:
    """Scripted person.  ``known_rooms`` get bearing plus distance,
    ``approx_rooms`` bearing only."""

    id: int
    x: float
    y: float
    kind: str = "generic"
    known_rooms: frozenset[str] = frozenset()
    knows_directory: bool = False
    approx_rooms: frozenset[str] = frozenset()
    name: str = ""

    def __post_init__(self):
        if self.kind not in NPC_KINDS:
            raise ValueError(f"npc {self.id}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class PosterSpec:
    """Wall clutter that the detector may mistake for a sign or label."""

    id: int
    x: float
    y: float
    yaw: float = 0.0


@dataclass(frozen=True)
class GoalSpec:
    room: str | None = None
    occupant: str | None = None

    def __post_init__(self):
        if (self.room is None) == (self.occupant is None):
            raise ValueError("goal must name exactly one of room or occupant")

    @property
    def text(self) -> str:
        return f"Room {self.room}" if self.room is not None else str(self.occupant)


@dataclass(frozen=True)
class DetectionEvent:
    frame_index: int
    category: str
    confidence: float
    box_width: float
    box_height: float
    position: tuple[float, float]
    approach_yaw: float
    # simulation ground truth: id of the source entity, None for clutter
    entity_id: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")
        if self.box_width < 0 or self.box_height < 0:
            raise ValueError("box size must be nonnegative")


@dataclass(eq=False)
class Scenario:
    name: str
    resolution: float
    grid: np.ndarray
    doors: list[DoorSpec]
    signs: list[SignSpec]
    npcs: list[NpcSpec]
    directory: dict[str, str]
    start_pose: Pose
    goal: GoalSpec
    time_limit: float = 900.0
    clock_costs: ClockCosts = field(default_factory=ClockCosts)
    posters: list[PosterSpec] = field(default_factory=list)
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        self.grid = np.ascontiguousarray(self.grid, dtype=np.int8)
        self.grid.setflags(write=False)
        self.walls = np.ascontiguousarray(self.grid == WALL)
        self.walls.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape

    @property
    def width_m(self) -> float:
        return self.grid.shape[1] * self.resolution

    @property
    def height_m(self) -> float:
        return self.grid.shape[0] * self.resolution

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        """(ix, iy) of the cell containing a world point."""
        return (
            int(math.floor((x - self.origin[0]) / self.resolution)),
            int(math.floor((y - self.origin[1]) / self.resolution)),
        )

    def in_bounds(self, ix: int, iy: int) -> bool:
        h, w = self.grid.shape
        return 0 <= ix < w and 0 <= iy < h

    def is_wall(self, ix: int, iy: int) -> bool:
        """Out-of-bounds counts as wall."""
        return not self.in_bounds(ix, iy) or bool(self.walls[iy, ix])

    def room_numbers(self) -> set[str]:
        return {d.label_text for d in self.doors if d.label_text is not None}

    def door_for_room(self, room: str) -> DoorSpec | None:
        for d in self.doors:
            if d.label_text == room:
                return d
        return None

    def npc(self, npc_id: int) -> NpcSpec:
        for n in self.npcs:
            if n.id == npc_id:
                return n
        raise KeyError(npc_id)
