import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import frontier_oracle, rectangle_map
from wayfinder.frontier import extract_frontiers, half_length_index, path_positions
from wayfinder.mapping import FREE, OCCUPIED, UNKNOWN, OccupancyGrid, explored_contour


def test_rectangle_maps_match_oracle():
    rng = np.random.default_rng(11)
    for _ in range(60):
        g, mask, rects = rectangle_map(rng)
        got = sorted((f.midpoint_cell, round(f.segment_length / g.resolution)) for f in extract_frontiers(g, mask))
        assert got == frontier_oracle(rects, mask)


def test_half_length_ties_go_low():
    assert half_length_index([0.0, 1.0, 2.0, 3.0]) == 1
    assert half_length_index([0.0, 1.0, 2.0]) == 1
    assert half_length_index(path_positions([(0, 0), (1, 1), (2, 1)])) == 1


def test_minimum_segment_is_five_steps():
    g = OccupancyGrid(0.1, (0.0, 0.0), (3, 12))
    g.cells[1, 1:7] = FREE  # 6 cells: 5 steps = 0.5 m
    mask = np.zeros(g.shape, dtype=bool)
    fs = extract_frontiers(g, mask)
    assert len(fs) == 1 and fs[0].segment_length == pytest.approx(0.5)
    g.cells[1, 6] = UNKNOWN
    assert extract_frontiers(g, mask) == []


def test_mask_shape_checked():
    g = OccupancyGrid(0.1, (0.0, 0.0), (3, 3))
    with pytest.raises(ValueError):
        extract_frontiers(g, np.zeros((2, 2), dtype=bool))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_frontier_invariants_on_arbitrary_maps(seed):
    rng = np.random.default_rng(seed)
    g = OccupancyGrid(0.1, (0.0, 0.0), (20, 20))
    g.cells = rng.choice([UNKNOWN, FREE, OCCUPIED], size=(20, 20), p=[0.35, 0.55, 0.1]).astype(np.int8)
    mask = rng.random((20, 20)) < 0.1
    boundary = set()
    for c in explored_contour(g):
        boundary |= set(c.cells)
    fs = extract_frontiers(g, mask)
    used = set()
    for f in fs:
        cells = set(f.segment_cells)
        assert not cells & used
        used |= cells
        assert cells <= boundary
        assert not any(mask[y, x] for x, y in cells)
        assert f.segment_length >= 0.5 - 1e-9
        assert f.midpoint_cell in cells
        assert f.midpoint == pytest.approx(g.center_of(*f.midpoint_cell))
    keys = [(-round(f.segment_length, 9), f.midpoint[1], f.midpoint[0]) for f in fs]
    assert keys == sorted(keys)
