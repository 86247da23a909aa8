import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wayfinder.world import (
    FREE,
    REFUSAL,
    WALL,
    Camera,
    DetectorModel,
    GoalSpec,
    NpcSpec,
    Pose,
    Scenario,
    ScenarioError,
    SensorError,
    dump_scenario,
    footprint_clear,
    line_of_sight,
    load_scenario,
    npc_respond,
    raycast_scan,
    relative_quadrant,
    segment_clear,
    simulate_detections,
    step_motion,
    wrap_angle,
)

from conftest import boxed

SMALL = """\
name: tiny
resolution: 0.5
start: 0.75 0.75 0
goal: room 101
time_limit: 300
MAP
#####
#..D#
#...#
#####
ENDMAP
DOOR
1 1.75 1.25 0 label="101"
END
NPC
3 1.25 0.75 0 kind=patient approx=101
END
"""


# -- scenario format ----------------------------------------------------------


def test_rows_are_listed_north_first():
    s = load_scenario(SMALL)
    assert s.grid.shape == (4, 5)
    # row 0 is the south wall, the door sits on the second row from the north
    assert s.grid[2, 3] != FREE and s.grid[2, 3] != WALL
    assert s.grid[1, 1] == FREE
    assert s.is_wall(0, 0)


def test_dump_load_fixpoint():
    s = load_scenario(SMALL)
    text = dump_scenario(s)
    again = dump_scenario(load_scenario(text))
    assert text == again
    t = load_scenario(text)
    assert t.doors == s.doors and t.npcs == s.npcs
    assert np.array_equal(t.grid, s.grid)


@pytest.mark.parametrize(
    "edit, field",
    [
        (lambda d: d.replace("goal: room 101", "goal: room 999"), "goal"),
        (lambda d: d.replace("start: 0.75 0.75 0", "start: 0.1 0.1 0"), "start_pose"),
        (lambda d: d.replace("time_limit: 300", "time_limit: 0"), "time_limit"),
        (lambda d: d.replace("approx=101", "approx=555"), "known_rooms"),
    ],
)
def test_invalid_documents_name_the_field(edit, field):
    with pytest.raises(ScenarioError) as err:
        load_scenario(edit(SMALL))
    assert err.value.field == field


def test_missing_map_block():
    with pytest.raises(ScenarioError):
        load_scenario("name: x\nresolution: 0.1\n")


def test_bad_map_character():
    with pytest.raises(ScenarioError):
        load_scenario(SMALL.replace("#..D#", "#..X#"))


# -- range scans --------------------------------------------------------------


def slab_range(walls: np.ndarray, px: float, py: float, ang: float, max_range: float) -> float:
    """Nearest ray/box entry over every wall cell and the outside of the grid (cell units)."""
    h, w = walls.shape
    dx, dy = math.cos(ang), math.sin(ang)
    best = math.inf

    def enter(x0, x1, y0, y1):
        t0, t1 = -math.inf, math.inf
        for p, d, lo, hi in ((px, dx, x0, x1), (py, dy, y0, y1)):
            if abs(d) < 1e-15:
                if not lo <= p <= hi:
                    return math.inf
                continue
            a, b = (lo - p) / d, (hi - p) / d
            t0, t1 = max(t0, min(a, b)), min(t1, max(a, b))
        return t0 if t0 <= t1 and t1 > 0 else math.inf

    for iy, ix in zip(*np.nonzero(walls)):
        best = min(best, enter(ix, ix + 1, iy, iy + 1))
    # leaving the grid: first time the ray crosses the border
    exits = []
    if dx > 0:
        exits.append((w - px) / dx)
    if dx < 0:
        exits.append(-px / dx)
    if dy > 0:
        exits.append((h - py) / dy)
    if dy < 0:
        exits.append(-py / dy)
    best = min(best, min(exits))
    return best if best <= max_range else math.inf


def test_raycast_matches_slab_oracle():
    rng = np.random.default_rng(7)
    for _ in range(20):
        walls = rng.random((32, 32)) < 0.12
        free = np.argwhere(~walls)
        iy, ix = free[rng.integers(len(free))]
        x, y = ix + rng.random(), iy + rng.random()
        grid = np.where(walls, WALL, FREE)
        sc = Scenario("r", 0.1, grid, [], [], [], {}, Pose(x * 0.1, y * 0.1), GoalSpec(occupant="x"))
        pose = Pose(x * 0.1, y * 0.1, float(rng.uniform(-math.pi, math.pi)))
        scan = raycast_scan(sc, pose, ray_count=64, max_range=2.0)
        for a, r in zip(scan.angles, scan.ranges):
            want = slab_range(walls, x, y, float(a), 20.0) * 0.1
            if math.isinf(want):
                assert math.isinf(r)
            else:
                assert r == pytest.approx(want, abs=1e-9)


def test_scan_from_inside_a_wall_is_an_error(corridor):
    with pytest.raises(SensorError):
        raycast_scan(corridor, Pose(0.05, 0.05))


def test_scan_is_deterministic(corridor):
    a = raycast_scan(corridor, corridor.start_pose)
    b = raycast_scan(corridor, corridor.start_pose)
    assert np.array_equal(a.ranges, b.ranges)
    assert len(a) == 720


def test_line_of_sight(corridor):
    assert line_of_sight(corridor, 1.0, 1.0, 8.0, 1.0)
    # through the wall between corridor and room, away from the door gap
    assert not line_of_sight(corridor, 1.0, 1.5, 1.0, 4.0)
    # through the door gap
    assert line_of_sight(corridor, 4.6, 1.5, 4.6, 4.0)


# -- detections ---------------------------------------------------------------


def test_detections_seeded_and_visible(corridor):
    pose = Pose(4.6, 1.0, math.pi / 2)
    a = simulate_detections(corridor, pose, Camera(), "door", 3)
    b = simulate_detections(corridor, pose, Camera(), "door", 3)
    assert a == b and len(a) == 1
    assert a[0].entity_id == 1
    # camera facing away sees nothing
    assert simulate_detections(corridor, Pose(4.6, 1.0, -math.pi / 2), Camera(), "door", 3) == []


def test_labels_only_at_close_range(corridor):
    lx, ly = corridor.doors[0].label_position
    near = Pose(lx, ly - 1.0, math.pi / 2)
    far = Pose(lx, 0.3, math.pi / 2)
    assert len(simulate_detections(corridor, near, Camera(), "room label", 0)) == 1
    assert simulate_detections(corridor, far, Camera(label_range=1.0), "room label", 0) == []


def test_clutter_rate_is_binomial(corridor):
    model = DetectorModel(clutter_rate=0.1)
    pose = Pose(2.0, 1.2, 0.0)
    fakes = 0
    for f in range(200):
        evs = simulate_detections(corridor, pose, Camera(), "directions sign", [11, f], f, model)
        fakes += sum(1 for e in evs if e.entity_id is None)
    # mean 20, sd ~4.2
    assert 20 - 13 <= fakes <= 20 + 13


def test_unknown_query():
    with pytest.raises(ValueError):
        simulate_detections(None, Pose(0, 0), Camera(), "chair", 0)


# -- people -------------------------------------------------------------------


def test_patient_refuses_unknown_room(corridor):
    p = NpcSpec(1, 2.0, 1.0, "patient")
    assert npc_respond(p, 2, "Room 3012", Pose(2.0, 1.2), corridor) == REFUSAL
    assert "Sorry, I don't know" in REFUSAL


def test_nurse_directory_lookup(corridor):
    sc = Scenario(
        "c", corridor.resolution, corridor.grid, corridor.doors, [], [], {"Dr. Ada Park": "3012"},
        corridor.start_pose, GoalSpec(occupant="Dr. Ada Park"),
    )
    nurse = NpcSpec(1, 2.0, 1.0, "nurse", frozenset({"3012"}), True)
    assert "3012" in npc_respond(nurse, 3, "Dr. Ada Park", Pose(2, 1.2), sc)
    patient = NpcSpec(2, 2.0, 1.0, "patient")
    assert npc_respond(patient, 3, "Dr. Ada Park", Pose(2, 1.2), sc) == REFUSAL


def test_known_room_gets_bearing_and_distance(corridor):
    nurse = NpcSpec(1, 2.0, 1.0, "nurse", frozenset({"3012"}))
    # door at (4.6, 2.6) is ahead-left of a robot facing east at (2, 1.2): within 45 deg
    reply = npc_respond(nurse, 2, "Room 3012", Pose(2.0, 1.2, 0.0), corridor)
    assert reply == "Room 3012 is straight ahead, about 5 meters away."
    vague = NpcSpec(2, 2.0, 1.0, "patient", approx_rooms=frozenset({"3012"}))
    assert npc_respond(vague, 2, "Room 3012", Pose(2.0, 1.2, math.pi), corridor) == (
        "I think Room 3012 is somewhere behind you."
    )


def test_type_one_is_a_request(corridor):
    assert npc_respond(NpcSpec(1, 0, 0), 1, None, Pose(0, 0), corridor).endswith("Room 3012?")
    with pytest.raises(ValueError):
        npc_respond(NpcSpec(1, 0, 0), 4, None, Pose(0, 0), corridor)


@pytest.mark.parametrize(
    "deg, want",
    [(0, "forward"), (45, "forward"), (46, "left"), (134, "left"), (135, "backwards"), (-135, "backwards"), (-90, "right")],
)
def test_relative_quadrant(deg, want):
    a = math.radians(deg)
    assert relative_quadrant(Pose(0, 0, 0), math.cos(a), math.sin(a)) == want


# -- motion -------------------------------------------------------------------


def test_blocked_step_leaves_pose_unchanged(corridor):
    p = Pose(1.0, 1.0, math.pi / 2)
    q, hit = step_motion(p, (2.0, 0.0), corridor)
    assert hit and q == p
    q, hit = step_motion(p, (0.5, -math.pi / 2), corridor)
    assert not hit and q.x == pytest.approx(1.5) and q.y == pytest.approx(1.0)


def test_footprint_uses_wall_cell_centres():
    sc = Scenario("b", 0.1, boxed(20, 20), [], [], [], {}, Pose(1, 1), GoalSpec(occupant="x"))
    # the west wall column has centres at x = 0.05
    assert footprint_clear(sc, Pose(0.36, 1.0))
    assert not footprint_clear(sc, Pose(0.34, 1.0))


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.4, 1.6), st.floats(0.4, 1.6), st.floats(0.4, 1.6), st.floats(0.4, 1.6), st.floats(0.05, 0.4)
)
def test_segment_clear_matches_dense_sampling(x0, y0, x1, y1, r):
    g = boxed(20, 20)
    g[8:12, 9:11] = WALL
    sc = Scenario("b", 0.1, g, [], [], [], {}, Pose(0.5, 0.5), GoalSpec(occupant="x"))
    cy, cx = np.nonzero(g == WALL)
    cx, cy = (cx + 0.5) * 0.1, (cy + 0.5) * 0.1
    ts = np.linspace(0.0, 1.0, 2001)
    px, py = x0 + ts * (x1 - x0), y0 + ts * (y1 - y0)
    dmin = np.sqrt(((px[:, None] - cx) ** 2 + (py[:, None] - cy) ** 2).min())
    step = math.hypot(x1 - x0, y1 - y0) / 2000
    if dmin > r + step:
        assert segment_clear(sc, x0, y0, x1, y1, r)
    elif dmin < r - 1e-9:
        assert not segment_clear(sc, x0, y0, x1, y1, r)


@given(st.floats(-50, 50, allow_nan=False))
def test_wrap_angle_range(a):
    w = wrap_angle(a)
    assert -math.pi <= w < math.pi
    assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)
    assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-9)
