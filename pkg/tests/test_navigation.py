from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_grid, ucs_cost
from collabsim.world.geometry import GridMap, OutOfBounds, Pose2D, normalize_angle
from collabsim.world.navigation import SQRT2, InvalidEndpoint, NoPath, astar, octile, path_cost, plan_path


def test_straight_line_cost():
    grid = GridMap.empty(10, 10)
    res = astar(grid, (0, 0), (0, 9))
    assert res.cost == 9.0
    assert res.cells[0] == (0, 0) and res.cells[-1] == (0, 9)


def test_diagonal_cost_matches_octile():
    grid = GridMap.empty(10, 10)
    res = astar(grid, (0, 0), (3, 7))
    assert res.cost == pytest.approx(octile((0, 0), (3, 7)))
    assert res.cost == pytest.approx(4 + 3 * SQRT2)


def test_no_corner_cutting():
    # two blocked cells touching at a corner: the diagonal squeeze is forbidden
    grid = GridMap.empty(3, 3).with_occupied([(0, 1), (1, 0)])
    with pytest.raises(NoPath):
        astar(grid, (0, 0), (1, 1))


def test_occupied_goal_is_invalid_endpoint():
    grid = GridMap.empty(5, 5).with_occupied([(2, 2)])
    with pytest.raises(InvalidEndpoint):
        astar(grid, (0, 0), (2, 2))


def test_plan_path_out_of_bounds():
    grid = GridMap.empty(5, 5)
    with pytest.raises(InvalidEndpoint):
        plan_path(grid, Pose2D(0.05, 0.05), Pose2D(9.0, 0.05))


def test_world_to_cell_rows_index_y():
    grid = GridMap.empty(10, 5, resolution=0.1)
    assert grid.world_to_cell(0.35, 0.12) == (1, 3)
    assert grid.cell_center((1, 3)) == pytest.approx((0.35, 0.15))
    with pytest.raises(OutOfBounds):
        grid.world_to_cell(-0.01, 0.0)


def test_rows_round_trip():
    grid = GridMap.empty(4, 3).with_occupied([(0, 0), (2, 3)])
    rows = grid.to_rows()
    assert rows[0] == "...#"  # top row is the largest y
    assert GridMap.from_rows(rows, grid.resolution) == grid


def test_cache_returns_same_result():
    grid, s, g = random_grid(3)
    try:
        first = astar(grid, s, g)
    except NoPath:
        with pytest.raises(NoPath):
            astar(grid, s, g)
        return
    assert astar(grid, s, g) is first


@pytest.mark.parametrize("seed", range(20))
def test_matches_uniform_cost_search(seed):
    grid, s, g = random_grid(1000 + seed)
    want = ucs_cost(np.asarray(grid.occupied), s, g)
    if want is None:
        with pytest.raises(NoPath):
            astar(grid, s, g)
    else:
        assert astar(grid, s, g).cost == want


def test_normalize_angle_range():
    assert normalize_angle(math.pi) == pytest.approx(-math.pi)
    assert normalize_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), density=st.floats(0.0, 0.4))
def test_path_is_valid_and_cost_consistent(seed, density):
    grid, s, g = random_grid(seed, size=12, density=density)
    try:
        res = astar(grid, s, g)
    except NoPath:
        return
    cells = res.cells
    assert cells[0] == s and cells[-1] == g
    for (r0, c0), (r1, c1) in zip(cells, cells[1:]):
        assert max(abs(r1 - r0), abs(c1 - c0)) == 1
        assert grid.is_free((r1, c1))
        if r0 != r1 and c0 != c1:
            assert grid.is_free((r1, c0)) and grid.is_free((r0, c1))
    assert res.cost == path_cost(cells)
    assert res.cost >= octile(s, g) - 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_cost_is_symmetric(seed):
    grid, s, g = random_grid(seed, size=10, density=0.2)
    try:
        forward = astar(grid, s, g).cost
    except NoPath:
        with pytest.raises(NoPath):
            astar(grid, g, s)
        return
    assert astar(grid, g, s).cost == pytest.approx(forward)
