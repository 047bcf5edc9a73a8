"""Task definitions, goal predicates and partial-success scoring."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from collabsim.codec import register
from collabsim.world.state import WorldState

PACK_VOCABULARY = ("apple", "fork", "soap", "toy_duck", "phone", "bottle", "book")
SOLID_COLORS = ("red", "blue", "pink", "green", "yellow", "purple")
SOLID_SHAPES = ("cube", "cylinder", "prism", "cone", "sphere", "pyramid")
SANDWICH_FILLINGS = ("ham", "bacon", "tomato", "cucumber", "cheese", "beef_patty")


@register("pack_objects")
@dataclass(frozen=True)
class PackObjects:
    object_ids: tuple[str, ...]
    tray_id: str = "tray"

    @property
    def object_order(self) -> tuple[str, ...]:
        return self.object_ids

    def destination(self, object_id: str) -> str:
        return self.tray_id


@register("sort_solids")
@dataclass(frozen=True)
class SortSolids:
    assignments: tuple[tuple[str, str], ...]

    @property
    def object_order(self) -> tuple[str, ...]:
        return tuple(solid for solid, _ in self.assignments)

    def destination(self, object_id: str) -> str:
        return dict(self.assignments)[object_id]


@register("make_sandwich")
@dataclass(frozen=True)
class MakeSandwich:
    ordered_ingredient_ids: tuple[str, ...]
    board_id: str = "cutting_board"

    @property
    def object_order(self) -> tuple[str, ...]:
        return self.ordered_ingredient_ids

    def destination(self, object_id: str) -> str:
        return self.board_id


TaskSpec = Union[PackObjects, SortSolids, MakeSandwich]

TASK_KINDS = {"pack_objects": PackObjects, "sort_solids": SortSolids, "make_sandwich": MakeSandwich}


@dataclass(frozen=True)
class GoalReport:
    success: bool
    correctly_placed: int
    total: int

    @property
    def partial_success(self) -> float:
        return self.correctly_placed / self.total if self.total else 1.0


def task_kind(task: TaskSpec) -> str:
    return task.type_tag  # type: ignore[union-attr]


def describe(task: TaskSpec) -> str:
    """One-paragraph natural-language goal statement."""
    if isinstance(task, PackObjects):
        return (
            "Pack objects: place each of these objects into the tray "
            f"({task.tray_id}) on the work table: {', '.join(task.object_ids)}."
        )
    if isinstance(task, SortSolids):
        pairs = ", ".join(f"{solid} -> {panel}" for solid, panel in task.assignments)
        return f"Sort solids: place every solid onto the panel of the same color: {pairs}."
    return (
        f"Make sandwich: stack these ingredients on the {task.board_id} from bottom to top, "
        f"in exactly this order: {', '.join(task.ordered_ingredient_ids)}."
    )


def _in_zone(state: WorldState, object_id: str, zone_id: str) -> bool:
    obj = state.objects.get(object_id)
    zone = state.zones.get(zone_id)
    if obj is None or zone is None:
        return False
    return obj.support.zone == zone_id and zone.contains(obj.pose.x, obj.pose.y)


def evaluate(state: WorldState, task: TaskSpec) -> GoalReport:
    if isinstance(task, PackObjects):
        total = len(task.object_ids)
        placed = sum(_in_zone(state, oid, task.tray_id) for oid in task.object_ids)
    elif isinstance(task, SortSolids):
        total = len(task.assignments)
        placed = sum(_in_zone(state, solid, panel) for solid, panel in task.assignments)
    elif isinstance(task, MakeSandwich):
        total = len(task.ordered_ingredient_ids)
        stack = [oid for oid in state.zone_stack(task.board_id) if _in_zone(state, oid, task.board_id)]
        placed = 0
        for want, have in zip(task.ordered_ingredient_ids, stack):
            if want != have:
                break
            placed += 1
    else:
        raise TypeError(f"unknown task {task!r}")
    return GoalReport(success=placed == total, correctly_placed=placed, total=total)


def validate_task(state: WorldState, task: TaskSpec) -> list[str]:
    problems: list[str] = []
    order = task.object_order
    if len(set(order)) != len(order):
        problems.append("task lists an object twice")
    for oid in order:
        if oid not in state.objects:
            problems.append(f"task object {oid} not in scenario")
    for oid in order:
        dest = task.destination(oid)
        if dest not in state.zones:
            problems.append(f"task destination {dest} is not a zone")
    if isinstance(task, SortSolids):
        for solid, panel in task.assignments:
            obj = state.objects.get(solid)
            zone = state.zones.get(panel)
            if obj is not None and zone is not None and obj.color != zone.color:
                problems.append(f"{solid} color {obj.color} does not match {panel} color {zone.color}")
    return problems
