"""Planar poses and the occupancy grid used for global navigation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from collabsim.codec import register

Cell = tuple[int, int]  # (row, col)

# Guards floor() against 1.3 / 0.1 == 12.999999999999998.
_EPS = 1e-9


def normalize_angle(theta: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped < 0.0:
        wrapped += 2.0 * math.pi
    out = wrapped - math.pi
    return -math.pi if out >= math.pi else out


@register("pose")
@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise ValueError(f"non-finite pose ({self.x}, {self.y}, {self.theta})")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    def distance_to(self, other: Pose2D) -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def translated(self, dx: float, dy: float) -> Pose2D:
        return Pose2D(self.x + dx, self.y + dy, self.theta)

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.theta]

    @classmethod
    def from_list(cls, values: list[float] | tuple[float, ...]) -> Pose2D:
        if len(values) == 2:
            return cls(values[0], values[1])
        return cls(values[0], values[1], values[2])


class OutOfBounds(ValueError):
    """A world coordinate or cell lies outside the grid."""


@dataclass(eq=False)
class GridMap:
    """Occupancy grid with the origin at world (0, 0); row indexes y, column indexes x."""

    resolution: float
    width: int
    height: int
    occupied: np.ndarray = field(repr=False)
    _path_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")
        if self.width < 1 or self.height < 1:
            raise ValueError("grid must be at least 1x1")
        occ = np.asarray(self.occupied, dtype=bool)
        if occ.shape != (self.height, self.width):
            raise ValueError(f"occupancy shape {occ.shape} != ({self.height}, {self.width})")
        occ.setflags(write=False)
        self.occupied = occ

    @classmethod
    def empty(cls, width: int, height: int, resolution: float = 0.1) -> GridMap:
        return cls(resolution, width, height, np.zeros((height, width), dtype=bool))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridMap):
            return NotImplemented
        return (
            self.resolution == other.resolution
            and self.width == other.width
            and self.height == other.height
            and bool(np.array_equal(self.occupied, other.occupied))
        )

    def in_bounds(self, cell: Cell) -> bool:
        r, c = cell
        return 0 <= r < self.height and 0 <= c < self.width

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and not self.occupied[cell]

    def world_to_cell(self, x: float, y: float) -> Cell:
        if x < 0.0 or y < 0.0:
            raise OutOfBounds(f"({x:.3f}, {y:.3f}) is outside the map")
        cell = (int(math.floor(y / self.resolution + _EPS)), int(math.floor(x / self.resolution + _EPS)))
        if not self.in_bounds(cell):
            raise OutOfBounds(f"({x:.3f}, {y:.3f}) is outside the map")
        return cell

    def cell_center(self, cell: Cell) -> tuple[float, float]:
        if not self.in_bounds(cell):
            raise OutOfBounds(f"cell {cell} is outside the map")
        r, c = cell
        return ((c + 0.5) * self.resolution, (r + 0.5) * self.resolution)

    def rect_cells(self, rect: tuple[float, float, float, float]) -> list[Cell]:
        """Cells overlapping the open rectangle (xmin, ymin, xmax, ymax), clipped to the map."""
        x0, y0, x1, y1 = rect
        c0 = max(0, int(math.floor(x0 / self.resolution + _EPS)))
        c1 = min(self.width, int(math.ceil(x1 / self.resolution - _EPS)))
        r0 = max(0, int(math.floor(y0 / self.resolution + _EPS)))
        r1 = min(self.height, int(math.ceil(y1 / self.resolution - _EPS)))
        return [(r, c) for r in range(r0, r1) for c in range(c0, c1)]

    def with_occupied(self, cells: list[Cell]) -> GridMap:
        occ = self.occupied.copy()
        for cell in cells:
            if self.in_bounds(cell):
                occ[cell] = True
        return GridMap(self.resolution, self.width, self.height, occ)

    def to_rows(self) -> list[str]:
        """Row strings, top row (largest y) first, '#' occupied and '.' free."""
        return ["".join("#" if v else "." for v in row) for row in self.occupied[::-1]]

    @classmethod
    def from_rows(cls, rows: list[str], resolution: float) -> GridMap:
        if not rows:
            raise ValueError("grid needs at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged grid rows")
        bad = {ch for r in rows for ch in r} - {"#", "."}
        if bad:
            raise ValueError(f"unexpected grid characters {sorted(bad)}")
        occ = np.array([[ch == "#" for ch in r] for r in rows[::-1]], dtype=bool)
        return cls(resolution, width, len(rows), occ)


def rect_distance(rect: tuple[float, float, float, float], x: float, y: float) -> float:
    """Planar distance from a point to an axis-aligned rectangle (0 inside)."""
    x0, y0, x1, y1 = rect
    dx = max(x0 - x, 0.0, x - x1)
    dy = max(y0 - y, 0.0, y - y1)
    return math.hypot(dx, dy)


def rect_contains(rect: tuple[float, float, float, float], x: float, y: float) -> bool:
    x0, y0, x1, y1 = rect
    return x0 <= x <= x1 and y0 <= y <= y1
