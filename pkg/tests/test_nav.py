import math

import numpy as np
import pytest

from oracles import dijkstra_steps, path_steps, random_maze
from wayfinder.mapping import FREE, OCCUPIED, OccupancyGrid, dilate_obstacles
from wayfinder.nav import (
    NoStandoff,
    Path,
    StartInObstacle,
    Unreachable,
    follow_path,
    passable_cells,
    plan_path,
    points_clear,
    reachable_from,
    standoff_pose,
)
from wayfinder.world import ClockCosts, GoalSpec, Pose, Scenario

from conftest import boxed


def test_plan_cost_matches_oracle():
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(40):
        g = random_maze(rng)
        mask = dilate_obstacles(g, 0.15)
        ok = passable_cells(g, mask)
        cells = np.argwhere(ok)
        for _ in range(3):
            sy, sx = cells[rng.integers(len(cells))]
            gy, gx = cells[rng.integers(len(cells))]
            want = dijkstra_steps(ok, (int(sx), int(sy)), (int(gx), int(gy)))
            if want is None:
                with pytest.raises(Unreachable):
                    plan_path(g, mask, g.center_of(sx, sy), g.center_of(gx, gy))
                continue
            p = plan_path(g, mask, g.center_of(sx, sy), g.center_of(gx, gy))
            assert path_steps(p.cells) == want
            assert all(ok[y, x] for x, y in p.cells)
            a, b = want
            assert p.length == pytest.approx((a + b * math.sqrt(2)) * g.resolution)
            checked += 1
    assert checked > 60


def test_no_corner_cutting():
    g = OccupancyGrid(1.0, (0.0, 0.0), (3, 3))
    g.cells[:] = FREE
    g.cells[1, 0] = OCCUPIED
    mask = np.zeros((3, 3), dtype=bool)
    mask[1, 0] = True
    p = plan_path(g, mask, (0.5, 0.5), (1.5, 1.5))
    # the diagonal (0,0)->(1,1) is blocked by the wall at (0,1)
    assert p.cells == ((0, 0), (1, 0), (1, 1))


def test_start_in_obstacle_and_snapping():
    g = OccupancyGrid(0.1, (0.0, 0.0), (10, 10))
    g.cells[:] = FREE
    g.cells[5, 5] = OCCUPIED
    mask = dilate_obstacles(g, 0.1)
    with pytest.raises(StartInObstacle):
        plan_path(g, mask, (0.55, 0.55), (0.15, 0.15))
    p = plan_path(g, mask, (0.55, 0.55), (0.15, 0.15), snap_start=0.2)
    assert p.cells[0] != (5, 5)
    # blocked goal snaps to the nearest free cell
    q = plan_path(g, mask, (0.15, 0.15), (0.55, 0.55))
    end = q.cells[-1]
    assert bool(~mask[end[1], end[0]])
    # the diagonal neighbours lie outside a 0.1 m inflation
    assert math.dist(g.center_of(*end), (0.55, 0.55)) == pytest.approx(0.1 * math.sqrt(2))


def test_follow_path_arithmetic():
    sc = Scenario("b", 0.1, boxed(40, 40), [], [], [], {}, Pose(1, 1), GoalSpec(occupant="x"))
    costs = ClockCosts(linear_speed=0.5, angular_speed=1.0)
    path = Path(((1.0, 1.0), (2.0, 1.0), (2.0, 3.0)), 3.0, ())
    steps = []
    r = follow_path(Pose(1.0, 1.0, 0.0), path, costs, sc, final_yaw=math.pi, on_step=steps.append)
    assert not r.collided
    assert r.distance == pytest.approx(3.0)
    assert r.rotation == pytest.approx(math.pi / 2 + math.pi / 2)
    assert r.elapsed == pytest.approx(3.0 / 0.5 + math.pi / 1.0)
    assert (r.pose.x, r.pose.y) == pytest.approx((2.0, 3.0))
    assert len(steps) == 3


def test_follow_path_stops_on_request_and_collision():
    sc = Scenario("b", 0.1, boxed(40, 40), [], [], [], {}, Pose(1, 1), GoalSpec(occupant="x"))
    costs = ClockCosts()
    path = Path(((1.0, 1.0), (3.0, 1.0)), 2.0, ())
    r = follow_path(Pose(1.0, 1.0), path, costs, sc, on_step=lambda p: True)
    assert r.stopped and r.distance == pytest.approx(1.0)
    wall = Path(((1.0, 1.0), (5.0, 1.0)), 4.0, ())
    r = follow_path(Pose(1.0, 1.0), wall, costs, sc)
    assert r.collided and r.pose.x < 3.7


def test_points_clear_agrees_with_mask():
    rng = np.random.default_rng(2)
    for _ in range(20):
        g = random_maze(rng, n=30)
        mask = dilate_obstacles(g, 0.35)
        ok = passable_cells(g, mask)
        for _ in range(20):
            iy, ix = rng.integers(0, 30, size=2)
            assert points_clear(g, [g.center_of(ix, iy)], 0.35) == bool(ok[iy, ix])


def test_reachable_is_four_connected():
    g = OccupancyGrid(1.0, (0.0, 0.0), (2, 2))
    g.cells[:] = [[FREE, OCCUPIED], [OCCUPIED, FREE]]
    mask = g.cells == OCCUPIED
    r = reachable_from(g, mask, 0.5, 0.5)
    assert r.sum() == 1


def test_standoff_direct_and_fallback():
    g = OccupancyGrid(0.1, (0.0, 0.0), (60, 60))
    g.cells[:] = FREE
    mask = np.zeros(g.shape, dtype=bool)
    p = standoff_pose(g, mask, (3.0, 3.0), 0.0, 1.0)
    assert (p.x, p.y) == pytest.approx((4.05, 3.05))
    assert p.yaw == pytest.approx(math.atan2(3.0 - 3.05, 3.0 - 4.05))
    # block the direct spot: the answer is the nearest allowed cell to it within 2 m
    mask[25:36, 36:46] = True
    q = standoff_pose(g, mask, (3.0, 3.0), 0.0, 1.0)
    ok = ~mask
    best = None
    for iy in range(60):
        for ix in range(60):
            cx, cy = g.center_of(ix, iy)
            if ok[iy, ix] and math.hypot(cx - 3, cy - 3) <= 2.0 and cx - 3.0 > 0:
                d = math.hypot(cx - 4.0, cy - 3.0)
                if best is None or d < best[0] - 1e-12:
                    best = (d, cx, cy)
    assert math.hypot(q.x - 4.0, q.y - 3.0) == pytest.approx(best[0])
    mask[:] = True
    with pytest.raises(NoStandoff):
        standoff_pose(g, mask, (3.0, 3.0), 0.0, 1.0)
