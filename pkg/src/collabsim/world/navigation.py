"""Global path planning: 8-connected A* over the occupancy grid.

Cost model: straight step 1, diagonal step sqrt(2); a diagonal step is only taken
when both orthogonally adjacent cells are free (no corner cutting).  The reported
cost is recomputed from the step counts of the returned path, so two optimal paths
always report bit-identical costs.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from collabsim.world.geometry import Cell, GridMap, OutOfBounds, Pose2D

SQRT2 = math.sqrt(2.0)

_STEPS = ((-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1))


class PlanningError(Exception):
    """Base class for path planning failures."""


class InvalidEndpoint(PlanningError):
    """Start or goal lies on an obstacle or outside the map."""


class NoPath(PlanningError):
    """The goal cell is not reachable from the start cell."""


@dataclass(frozen=True)
class PathResult:
    cells: tuple[Cell, ...]
    cost: float


def octile(a: Cell, b: Cell) -> float:
    dr = abs(a[0] - b[0])
    dc = abs(a[1] - b[1])
    return (max(dr, dc) - min(dr, dc)) + SQRT2 * min(dr, dc)


def neighbors(grid: GridMap, cell: Cell):
    r, c = cell
    for dr, dc in _STEPS:
        nr, nc = r + dr, c + dc
        if not grid.is_free((nr, nc)):
            continue
        if dr and dc and not (grid.is_free((r + dr, c)) and grid.is_free((r, c + dc))):
            continue
        yield (nr, nc), (SQRT2 if dr and dc else 1.0)


def path_cost(cells: tuple[Cell, ...] | list[Cell]) -> float:
    straight = diagonal = 0
    for (r0, c0), (r1, c1) in zip(cells, cells[1:]):
        if r0 != r1 and c0 != c1:
            diagonal += 1
        else:
            straight += 1
    return straight + diagonal * SQRT2


def astar(grid: GridMap, start: Cell, goal: Cell) -> PathResult:
    """A* between two cells.  Open-list ties break on (h, row, col)."""
    if not grid.is_free(start):
        raise InvalidEndpoint(f"start cell {start} is occupied or out of bounds")
    if not grid.is_free(goal):
        raise InvalidEndpoint(f"goal cell {goal} is occupied or out of bounds")

    key = (start, goal)
    cached = grid._path_cache.get(key)
    if cached is not None:
        if isinstance(cached, NoPath):
            raise NoPath(str(cached))
        return cached

    h0 = octile(start, goal)
    open_heap = [(h0, h0, start[0], start[1])]
    g_score = {start: 0.0}
    parent: dict[Cell, Cell] = {}
    closed: set[Cell] = set()
    while open_heap:
        _, _, r, c = heapq.heappop(open_heap)
        cell = (r, c)
        if cell in closed:
            continue
        if cell == goal:
            path = [cell]
            while path[-1] in parent:
                path.append(parent[path[-1]])
            path.reverse()
            result = PathResult(tuple(path), path_cost(path))
            grid._path_cache[key] = result
            return result
        closed.add(cell)
        g = g_score[cell]
        for nxt, step in neighbors(grid, cell):
            if nxt in closed:
                continue
            ng = g + step
            if ng < g_score.get(nxt, math.inf):
                g_score[nxt] = ng
                parent[nxt] = cell
                h = octile(nxt, goal)
                heapq.heappush(open_heap, (ng + h, h, nxt[0], nxt[1]))

    err = NoPath(f"no path from {start} to {goal}")
    grid._path_cache[key] = err
    raise err


def plan_path(grid: GridMap, start: Pose2D, goal: Pose2D) -> PathResult:
    """Plan between the cells containing two world poses."""
    try:
        start_cell = grid.world_to_cell(start.x, start.y)
        goal_cell = grid.world_to_cell(goal.x, goal.y)
    except OutOfBounds as exc:
        raise InvalidEndpoint(str(exc)) from exc
    return astar(grid, start_cell, goal_cell)
