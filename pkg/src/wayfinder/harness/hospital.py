"""Procedural single-floor hospital.

A west lobby opens onto an east-west spine corridor.  Three wings branch
north off the spine, each lined with rooms on both sides; more rooms line
the spine's south side.  Rooms are numbered 3001 upward in depth-first
order over the corridor tree (spine west to east, descending into each wing
as it is passed), and zones take contiguous blocks of numbers.  Directional
signs hang in the lobby and at each wing junction, facing West.

Geometry is laid out in whole cells (0.1 m) so walls and doors land exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..world.scenario import dump_scenario, load_scenario
from ..world.types import (
    DOOR,
    FREE,
    WALL,
    ClockCosts,
    DoorSpec,
    GoalSpec,
    NpcSpec,
    Pose,
    PosterSpec,
    Scenario,
    SignSpec,
)

RES = 0.1
FIRST_ROOM = 3001
ZONES = (
    ("Reception", 3),
    ("Waiting", 3),
    ("Public Service", 5),
    ("Consultation", 10),
    ("Examination", 10),
    ("Support", 8),
    ("Stairs", 2),
)
N_ROOMS = sum(n for _, n in ZONES)
WALL_T = 2
CORRIDOR = 24
DOOR_W = 12
LOBBY_W = 80
LOBBY_REACH = 30
DOCTOR_NAMES = ("Dr. Ada Park", "Dr. Omar Reyes", "Dr. Lena Fischer", "Dr. Sam Okafor", "Dr. Mia Chen")

REPLICA_PATH = Path(__file__).resolve().parent.parent / "assets" / "hospital_replica.scn"


@dataclass(frozen=True)
class Layout:
    depth: int  # room depth, cells
    pitch: int  # room pitch along a corridor, cells (includes one wall)
    wing_rows: tuple[int, int, int]


@dataclass
class _Slot:
    x: int  # door centre, cells (wall centreline)
    y: int
    yaw: float
    order: tuple  # depth-first sort key


def zone_of(room: int) -> str:
    k = room - FIRST_ROOM
    for name, n in ZONES if k >= 0 else ():
        if k < n:
            return name
        k -= n
    raise ValueError(f"room {room} outside the numbered range")


def zone_rooms(name: str) -> list[str]:
    start = FIRST_ROOM
    for zn, n in ZONES:
        if zn == name:
            return [str(r) for r in range(start, start + n)]
        start += n
    raise KeyError(name)


def _choose_layout(rng: np.random.Generator) -> Layout:
    while True:
        depth = int(rng.choice([40, 45, 50]))
        pitch = int(rng.choice([34, 36, 38]))
        rows = tuple(int(r) for r in rng.integers(5, 8, size=3))
        lay = Layout(depth, pitch, rows)
        n = _slot_count(lay)
        if N_ROOMS <= n <= N_ROOMS + 5:
            return lay


def _block_width(lay: Layout) -> int:
    return 2 * lay.depth + CORRIDOR + 3 * WALL_T


def _slot_count(lay: Layout) -> int:
    return 2 * sum(lay.wing_rows) + _south_count(lay)


def _south_count(lay: Layout) -> int:
    x0 = LOBBY_W + 2 * WALL_T
    xe = x0 + 3 * _block_width(lay) - WALL_T
    return (xe - x0 + WALL_T) // lay.pitch


def _phrase(rooms: list[int]) -> list[str]:
    """Zone-labelled ranges such as "Consultation 3012-3021"."""
    out = []
    rooms = sorted(rooms)
    i = 0
    while i < len(rooms):
        z = zone_of(rooms[i])
        j = i
        while j + 1 < len(rooms) and rooms[j + 1] == rooms[j] + 1 and zone_of(rooms[j + 1]) == z:
            j += 1
        a, b = rooms[i], rooms[j]
        out.append(f"{z} {a}-{b}" if b > a else f"{z} {a}")
        i = j + 1
    return out


def build_hospital(seed: int, goal: GoalSpec | None = None, layout: Layout | None = None, name=None) -> Scenario:
    rng = np.random.default_rng(seed)
    lay = layout or _choose_layout(rng)
    D, P = lay.depth, lay.pitch
    t, C = WALL_T, CORRIDOR
    s0 = t + D + t  # spine south edge
    n0 = s0 + C + t  # first wing row
    bw = _block_width(lay)
    bx0 = LOBBY_W + 2 * t
    xe = bx0 + 3 * bw - t
    width = xe + t
    height = max(n0 + r * P for r in lay.wing_rows) + t
    height = max(height, s0 + C + LOBBY_REACH + t)

    grid = np.full((height, width), WALL, dtype=np.int8)

    def carve(x0, y0, x1, y1, kind=FREE):
        grid[y0:y1, x0:x1] = kind

    # lobby and spine
    carve(t, s0 - LOBBY_REACH, t + LOBBY_W, s0 + C + LOBBY_REACH)
    carve(t + LOBBY_W - 10, s0, xe, s0 + C)

    slots: list[_Slot] = []
    junctions = []
    for k in range(3):
        bx = bx0 + k * bw
        cx0 = bx + D + t  # wing corridor west edge
        rows = lay.wing_rows[k]
        top = n0 + rows * P - t
        carve(cx0, s0 + C, cx0 + C, top)
        junctions.append((cx0 + C // 2, k))
        for i in range(rows):
            y0 = n0 + i * P
            y1 = y0 + P - t
            yc = (y0 + y1) // 2
            # west room, door through the corridor's west wall
            carve(bx, y0, bx + D, y1)
            carve(cx0 - t, yc - DOOR_W // 2, cx0, yc + DOOR_W // 2, DOOR)
            slots.append(_Slot(cx0 - t + 1, yc, 0.0, (cx0 + C // 2, 1, i, 0)))
            # east room
            ex0 = cx0 + C + t
            carve(ex0, y0, ex0 + D, y1)
            carve(cx0 + C, yc - DOOR_W // 2, cx0 + C + t, yc + DOOR_W // 2, DOOR)
            slots.append(_Slot(cx0 + C + 1, yc, math.pi, (cx0 + C // 2, 1, i, 1)))
    for j in range(_south_count(lay)):
        x0 = bx0 + j * P
        x1 = x0 + P - t
        xc = (x0 + x1) // 2
        carve(x0, t, x1, t + D)
        carve(xc - DOOR_W // 2, t + D, xc + DOOR_W // 2, s0, DOOR)
        slots.append(_Slot(xc, t + D + 1, math.pi / 2, (xc, 0, 0, 0)))

    # extra slots become unlabelled doors; the rest are numbered depth first
    slots.sort(key=lambda s: s.order)
    extra = set(int(i) for i in rng.choice(len(slots), size=len(slots) - N_ROOMS, replace=False))
    doors: list[DoorSpec] = []
    room_of_slot: dict[int, int] = {}
    number = FIRST_ROOM
    for i, sl in enumerate(slots):
        label = None
        if i not in extra:
            label = str(number)
            room_of_slot[i] = number
            number += 1
        doors.append(DoorSpec(i, sl.x * RES, sl.y * RES, sl.yaw, label))

    spine_y = (s0 + C / 2) * RES
    door_by_room = {d.label_text: d for d in doors if d.label_text}

    # signs: lobby, then one per wing junction
    signs = []
    all_rooms = sorted(room_of_slot.values())
    lobby_x = (t + LOBBY_W - 25) * RES
    signs.append(SignSpec(0, lobby_x, spine_y, math.pi, tuple(("forward", s) for s in _phrase(all_rooms))))
    for jx, k in junctions:
        wing = [room_of_slot[i] for i, sl in enumerate(slots) if i in room_of_slot and sl.order[0] == jx and sl.order[1] == 1]
        before = [r for r in all_rooms if r < min(wing)]
        after = [r for r in all_rooms if r > max(wing)]
        entries = [("left", s) for s in _phrase(wing)]
        entries += [("forward", s) for s in _phrase(after)]
        entries += [("backwards", s) for s in _phrase(before)]
        signs.append(SignSpec(k + 1, jx * RES, spine_y, math.pi, tuple(entries)))

    # people
    rooms_all = frozenset(str(r) for r in all_rooms)
    consult = zone_rooms("Consultation")
    doc_rooms = [consult[int(i)] for i in sorted(rng.choice(len(consult), size=3, replace=False))]
    names = [DOCTOR_NAMES[int(i)] for i in rng.choice(len(DOCTOR_NAMES), size=3, replace=False)]
    directory = dict(zip(names, doc_rooms))
    npcs: list[NpcSpec] = []
    taken: list[tuple[float, float]] = []

    def place(x, y):
        taken.append((x, y))
        return x, y

    def corridor_point(d: DoorSpec):
        off = (C / 2 + 1) * RES
        return (d.x + off * math.cos(d.yaw), d.y + off * math.sin(d.yaw))

    def free_spot(candidates):
        for x, y in candidates:
            if all(math.hypot(x - a, y - b) >= 2.5 for a, b in taken):
                return place(x, y)
        raise RuntimeError("could not place a person")

    approx_public = frozenset(zone_rooms("Waiting") + zone_rooms("Public Service"))
    nid = 0
    # nurses: lobby desk and the mouth of each wing
    nurse_spots = [((t + 20) * RES, spine_y + 1.8)]
    for jx, _ in junctions:
        nurse_spots.append((jx * RES, (n0 + 20) * RES))
    for x, y in nurse_spots:
        x, y = free_spot([(x, y), (x, y + 1.5), (x, y + 3.0)])
        npcs.append(NpcSpec(nid, x, y, "nurse", rooms_all, True, frozenset(), f"Nurse {nid}"))
        nid += 1
    for nm, room in directory.items():
        cx, cy = corridor_point(door_by_room[room])
        dx, dy = -math.sin(door_by_room[room].yaw), math.cos(door_by_room[room].yaw)
        x, y = free_spot([(cx + s * dx, cy + s * dy) for s in (0.0, 2.5, -2.5, 5.0, -5.0)])
        npcs.append(
            NpcSpec(nid, x, y, "doctor", frozenset(consult), True, rooms_all - frozenset(consult), nm)
        )
        nid += 1
    patient_spots = []
    for _ in range(200):
        if rng.random() < 0.5:
            patient_spots.append(
                (float(rng.uniform((t + 10) * RES, (t + LOBBY_W - 10) * RES)), float(rng.uniform((s0 - 20) * RES, (s0 + C + 20) * RES)))
            )
        else:
            patient_spots.append((float(rng.uniform(bx0 * RES, (xe - 10) * RES)), spine_y))
    for _ in range(4):
        x, y = free_spot(patient_spots)
        npcs.append(NpcSpec(nid, x, y, "patient", frozenset(), False, approx_public, f"Patient {nid}"))
        nid += 1

    # posters on the spine walls, clear of doors and labels
    posters = []
    for _ in range(400):
        if len(posters) == 6:
            break
        x = float(rng.uniform(bx0 * RES + 1.0, xe * RES - 1.0))
        north = bool(rng.random() < 0.5)
        y = (s0 + C) * RES - 0.05 if north else s0 * RES + 0.05
        if any(math.hypot(x - d.x, y - d.y) < 1.5 or math.hypot(x - d.label_position[0], y - d.label_position[1]) < 1.0 for d in doors):
            continue
        if grid[int((y + (0.1 if north else -0.1)) / RES), int(x / RES)] != WALL:
            continue
        posters.append(PosterSpec(len(posters), x, y, -math.pi / 2 if north else math.pi / 2))

    if goal is None:
        goal = GoalSpec(room=str(FIRST_ROOM + int(rng.integers(N_ROOMS))))
    start = Pose((t + 15) * RES, spine_y, 0.0)
    return Scenario(
        name=name or f"hospital-{seed}",
        resolution=RES,
        grid=grid,
        doors=doors,
        signs=signs,
        npcs=npcs,
        directory=directory,
        start_pose=start,
        goal=goal,
        time_limit=900.0,
        clock_costs=ClockCosts(),
        posters=posters,
    )


def generate_hospital(seed: int, goal: GoalSpec | None = None) -> str:
    """Scenario document for the hospital built from ``seed``."""
    return dump_scenario(build_hospital(seed, goal))


def replica_layout() -> Layout:
    return Layout(depth=45, pitch=36, wing_rows=(6, 6, 6))


def load_replica(goal: GoalSpec | None = None) -> Scenario:
    s = load_scenario(REPLICA_PATH.read_text(encoding="utf-8"))
    if goal is not None:
        s.goal = goal
    return s
