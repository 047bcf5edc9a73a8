"""Execution feedback: the closed set of success/failure variants and their text.

Failure reasons are plain string constants so they survive JSON round trips
unchanged.  ``ROLE_ILLEGAL`` is shared by every failure variant and reports an
action outside the robot's capabilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from collabsim.codec import register
from collabsim.world.geometry import Pose2D

INVALID_ENDPOINT = "invalid_endpoint"
INVALID_TARGET = "invalid_target"
POSE_DISCREPANCY = "pose_discrepancy"
ALREADY_OPEN_OR_NOT_OPENABLE = "already_open_or_not_openable"
OUT_OF_RANGE = "out_of_range"
GRIPPER_OCCUPIED = "gripper_occupied"
UNKNOWN_OBJECT = "unknown_object"
INVALID_CONFIGURATION = "invalid_configuration"
TOO_FAR = "too_far"
GRIPPER_EMPTY = "gripper_empty"
OBJECT_MISMATCH = "object_mismatch"
NOT_AT_TARGET = "not_at_target"
ROLE_ILLEGAL = "role_illegal"

NAVIGATION_REASONS = (INVALID_ENDPOINT, INVALID_TARGET, POSE_DISCREPANCY)
OPEN_REASONS = (ALREADY_OPEN_OR_NOT_OPENABLE, OUT_OF_RANGE)
PICK_REASONS = (GRIPPER_OCCUPIED, UNKNOWN_OBJECT, INVALID_CONFIGURATION, TOO_FAR)
PLACE_REASONS = (GRIPPER_EMPTY, OBJECT_MISMATCH, NOT_AT_TARGET)

_REASON_TEXT = {
    INVALID_ENDPOINT: "the start or end point of the global path is on an obstacle or outside the map",
    INVALID_TARGET: "the navigation target does not exist in the scene graph or does not support navigation",
    POSE_DISCREPANCY: "the final pose differs from the target pose by more than the allowed threshold",
    ALREADY_OPEN_OR_NOT_OPENABLE: "the target is already open or cannot be opened",
    OUT_OF_RANGE: "the target is beyond the operational range of the robot",
    GRIPPER_OCCUPIED: "the gripper is already holding another object",
    UNKNOWN_OBJECT: "the scene graph has no information about the object",
    INVALID_CONFIGURATION: "the initial or target arm configuration is invalid",
    TOO_FAR: "the object is beyond the reachable distance",
    GRIPPER_EMPTY: "the gripper is empty",
    OBJECT_MISMATCH: "the object does not match the object currently grasped",
    NOT_AT_TARGET: "the object could not be placed at the target location",
    ROLE_ILLEGAL: "this robot cannot perform that action",
}


@register("sighting")
@dataclass(frozen=True)
class ObjectSighting:
    object_id: str
    category: str
    pose: Pose2D
    furniture_id: str
    relation: str
    zone: Optional[str] = None
    color: Optional[str] = None


@register("navigation_success")
@dataclass(frozen=True)
class NavigationSuccess:
    target: str
    index: int
    pose: Pose2D
    surface_objects: Optional[tuple[ObjectSighting, ...]] = None


@register("open_success")
@dataclass(frozen=True)
class OpenSuccess:
    furniture: str
    contents: tuple[ObjectSighting, ...] = ()


@register("move_success")
@dataclass(frozen=True)
class MoveSuccess:
    dx: float
    dy: float


@register("pick_success")
@dataclass(frozen=True)
class PickSuccess:
    object: str


@register("place_success")
@dataclass(frozen=True)
class PlaceSuccess:
    object: str
    location: str
    pose: Pose2D
    furniture_id: str = ""
    relation: str = "on"


@register("navigation_failed")
@dataclass(frozen=True)
class NavigationFailed:
    target: str
    reason: str
    note: str = ""


@register("open_failed")
@dataclass(frozen=True)
class OpenFailed:
    furniture: str
    reason: str
    note: str = ""


@register("move_failed")
@dataclass(frozen=True)
class MoveFailed:
    dx: float
    dy: float
    reason: str
    note: str = ""


@register("pick_failed")
@dataclass(frozen=True)
class PickFailed:
    object: str
    reason: str
    distance: Optional[float] = None
    dx: Optional[float] = None
    dy: Optional[float] = None
    note: str = ""


@register("place_failed")
@dataclass(frozen=True)
class PlaceFailed:
    object: str
    destination: str
    reason: str
    note: str = ""


@register("task_status")
@dataclass(frozen=True)
class TaskStatus:
    text: str


@register("wait_ack")
@dataclass(frozen=True)
class WaitAck:
    note: str = ""


Feedback = Union[
    NavigationSuccess,
    OpenSuccess,
    MoveSuccess,
    PickSuccess,
    PlaceSuccess,
    NavigationFailed,
    OpenFailed,
    MoveFailed,
    PickFailed,
    PlaceFailed,
    TaskStatus,
    WaitAck,
]

SUCCESS_TYPES = (NavigationSuccess, OpenSuccess, MoveSuccess, PickSuccess, PlaceSuccess)
FAILURE_TYPES = (NavigationFailed, OpenFailed, MoveFailed, PickFailed, PlaceFailed)
FEEDBACK_TYPES = SUCCESS_TYPES + FAILURE_TYPES + (TaskStatus, WaitAck)

WAIT_ACK_TEXT = "Wait acknowledged; nothing changed."


def is_failure(fb: Feedback) -> bool:
    return isinstance(fb, FAILURE_TYPES)


def _sighting_text(s: ObjectSighting) -> str:
    where = s.zone or s.furniture_id
    return f"{s.object_id} ({s.category}) at ({s.pose.x:.2f}, {s.pose.y:.2f}) {s.relation} {where}"


def _with_note(text: str, note: str) -> str:
    return f"{text} Note: {note}" if note else text


def render_feedback(fb: Feedback) -> str:
    if isinstance(fb, NavigationSuccess):
        text = f"Navigation succeeded: arrived at {fb.target} nav target {fb.index} ({fb.pose.x:.2f}, {fb.pose.y:.2f})."
        if fb.surface_objects is not None:
            if fb.surface_objects:
                text += " Objects on its surface: " + "; ".join(_sighting_text(s) for s in fb.surface_objects) + "."
            else:
                text += " Its surface is empty."
        return text
    if isinstance(fb, OpenSuccess):
        if fb.contents:
            inside = "; ".join(_sighting_text(s) for s in fb.contents)
        else:
            inside = "nothing"
        return f"Open succeeded: {fb.furniture} is now open. It contains: {inside}."
    if isinstance(fb, MoveSuccess):
        return f"Move succeeded: base displaced by dx={fb.dx:.2f} m along x and dy={fb.dy:.2f} m along y."
    if isinstance(fb, PickSuccess):
        return f"Pick succeeded: {fb.object} is now in the gripper."
    if isinstance(fb, PlaceSuccess):
        return f"Place succeeded: {fb.object} was placed at {fb.location}."
    if isinstance(fb, NavigationFailed):
        return _with_note(f"Navigation to {fb.target} failed: {_REASON_TEXT[fb.reason]}.", fb.note)
    if isinstance(fb, OpenFailed):
        return _with_note(f"Open {fb.furniture} failed: {_REASON_TEXT[fb.reason]}.", fb.note)
    if isinstance(fb, MoveFailed):
        return _with_note(
            f"Move by ({fb.dx:.2f}, {fb.dy:.2f}) failed: {_REASON_TEXT[fb.reason]}.", fb.note
        )
    if isinstance(fb, PickFailed):
        text = f"Pick {fb.object} failed: {_REASON_TEXT[fb.reason]}."
        if fb.reason == TOO_FAR and fb.distance is not None:
            text += f" Distance to the object is {fb.distance:.2f} m."
            if fb.dx is not None and fb.dy is not None:
                text += f" Relative offset from the base: dx={fb.dx:.2f} m, dy={fb.dy:.2f} m."
        return _with_note(text, fb.note)
    if isinstance(fb, PlaceFailed):
        return _with_note(
            f"Place {fb.object} at {fb.destination} failed: {_REASON_TEXT[fb.reason]}.", fb.note
        )
    if isinstance(fb, TaskStatus):
        return f"Task status: {fb.text}"
    if isinstance(fb, WaitAck):
        return _with_note(WAIT_ACK_TEXT, fb.note)
    raise TypeError(f"not a feedback value: {fb!r}")


def task_status(state, task) -> TaskStatus:
    """Describe task progress on the work table (manipulation robot only)."""
    from collabsim.tasks import MakeSandwich, PackObjects, SortSolids

    def names(ids: list[str]) -> str:
        return ", ".join(state.objects[i].display_name for i in ids) if ids else "nothing"

    if isinstance(task, PackObjects):
        return TaskStatus(f"tray contains: {names(state.zone_stack(task.tray_id))}")
    if isinstance(task, SortSolids):
        panels = sorted({panel for _, panel in task.assignments})
        parts = [f"{p}: {names(state.zone_stack(p))}" for p in panels]
        return TaskStatus("panels - " + "; ".join(parts))
    if isinstance(task, MakeSandwich):
        return TaskStatus(f"cutting board from bottom to top: {names(state.zone_stack(task.board_id))}")
    raise TypeError(f"unknown task {task!r}")
