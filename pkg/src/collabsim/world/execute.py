"""Deterministic state transition: apply one robot action, return feedback.

Failures never raise; they come back as failure feedback and leave the state
untouched.  Only success variants produce a modified copy of the state.
"""

from __future__ import annotations

from typing import Optional

from collabsim import feedback as fb
from collabsim.comms import Message, MessageBus, UnknownRecipient
from collabsim.world.actions import (
    LEGAL_ACTIONS,
    Action,
    Move,
    Navigate,
    Open,
    Pick,
    Place,
    SendMessage,
    Wait,
)
from collabsim.world.geometry import Pose2D, rect_distance
from collabsim.world.kinematics import check_reach, configuration_valid, placement_for
from collabsim.world.navigation import InvalidEndpoint, NoPath, plan_path
from collabsim.world.state import SimObject, Support, WorldState


def sighting(obj: SimObject) -> fb.ObjectSighting:
    sup = obj.support
    return fb.ObjectSighting(
        object_id=obj.id,
        category=obj.category,
        pose=obj.pose,
        furniture_id=sup.parent,
        relation=sup.relation,
        zone=sup.zone,
        color=obj.color,
    )


def observe(state: WorldState, robot_id: str) -> tuple[fb.ObjectSighting, ...]:
    """Local view: objects resting on furniture surfaces within the view radius.

    Contents of containers are never visible here, open or closed; they are
    revealed only by opening the container.
    """
    robot = state.robots[robot_id]
    radius = state.thresholds.view_radius
    seen = []
    for oid in sorted(state.objects):
        obj = state.objects[oid]
        if obj.support.relation != "on":
            continue
        if robot.base_pose.distance_to(obj.pose) <= radius:
            seen.append(sighting(obj))
    return tuple(seen)


def _illegal_feedback(action: Action, role: str) -> fb.Feedback:
    note = f"a {role} robot cannot {type(action).__name__.lower()}"
    if isinstance(action, Navigate):
        return fb.NavigationFailed(action.furniture, fb.ROLE_ILLEGAL, note)
    if isinstance(action, Move):
        return fb.MoveFailed(action.dx, action.dy, fb.ROLE_ILLEGAL, note)
    if isinstance(action, Open):
        return fb.OpenFailed(action.furniture, fb.ROLE_ILLEGAL, note)
    if isinstance(action, Pick):
        return fb.PickFailed(action.object, fb.ROLE_ILLEGAL, note=note)
    if isinstance(action, Place):
        return fb.PlaceFailed(action.object, action.destination, fb.ROLE_ILLEGAL, note)
    return fb.WaitAck(note)


def _relocate(state: WorldState, robot_id: str, pose: Pose2D) -> WorldState:
    new = state.copy()
    robot = new.robots[robot_id]
    robot.base_pose = pose
    if robot.gripper is not None:
        new.objects[robot.gripper].pose = Pose2D(pose.x, pose.y)
    return new


def _navigate(state: WorldState, robot_id: str, action: Navigate):
    robot = state.robots[robot_id]
    host = state.furniture.get(action.furniture)
    if host is None or not (0 <= action.index < len(host.nav_targets)):
        return state, fb.NavigationFailed(action.furniture, fb.INVALID_TARGET)
    goal = host.nav_targets[action.index]
    try:
        plan_path(state.grid, robot.base_pose, goal)
    except InvalidEndpoint as exc:
        return state, fb.NavigationFailed(action.furniture, fb.INVALID_ENDPOINT, str(exc))
    except NoPath:
        # The base never leaves its cell, so it ends far from the requested pose.
        return state, fb.NavigationFailed(
            action.furniture, fb.POSE_DISCREPANCY, "no collision-free path to the target"
        )
    new = _relocate(state, robot_id, goal)
    surface = None
    if not host.openable:
        surface = tuple(sighting(new.objects[oid]) for oid in host.surface_object_ids)
    return new, fb.NavigationSuccess(action.furniture, action.index, goal, surface)


def apply_move(state: WorldState, robot_id: str, dx: float, dy: float):
    robot = state.robots[robot_id]
    if not robot.mobile:
        return state, fb.MoveFailed(dx, dy, fb.ROLE_ILLEGAL, f"{robot_id} has a fixed base")
    try:
        goal = robot.base_pose.translated(dx, dy)
        plan_path(state.grid, robot.base_pose, goal)
    except (InvalidEndpoint, ValueError) as exc:
        return state, fb.MoveFailed(dx, dy, fb.INVALID_ENDPOINT, str(exc))
    except NoPath:
        return state, fb.MoveFailed(dx, dy, fb.POSE_DISCREPANCY, "no collision-free path to the target")
    return _relocate(state, robot_id, goal), fb.MoveSuccess(dx, dy)


def _open(state: WorldState, robot_id: str, action: Open):
    robot = state.robots[robot_id]
    host = state.furniture.get(action.furniture)
    if host is None:
        return state, fb.OpenFailed(action.furniture, fb.ALREADY_OPEN_OR_NOT_OPENABLE, "no such furniture")
    if not host.openable or host.is_open:
        return state, fb.OpenFailed(action.furniture, fb.ALREADY_OPEN_OR_NOT_OPENABLE)
    distance = rect_distance(host.footprint, robot.base_pose.x, robot.base_pose.y)
    if distance > state.thresholds.open_radius:
        return state, fb.OpenFailed(
            action.furniture, fb.OUT_OF_RANGE, f"distance {distance:.2f} m exceeds {state.thresholds.open_radius:.2f} m"
        )
    new = state.copy()
    new.furniture[host.id].is_open = True
    contents = tuple(sighting(new.objects[oid]) for oid in host.contained_object_ids)
    return new, fb.OpenSuccess(host.id, contents)


def _pick(state: WorldState, robot_id: str, action: Pick, known):
    robot = state.robots[robot_id]
    if robot.gripper is not None:
        return state, fb.PickFailed(action.object, fb.GRIPPER_OCCUPIED, note=f"holding {robot.gripper}")
    obj = state.objects.get(action.object)
    if obj is None or (known is not None and action.object not in known):
        return state, fb.PickFailed(action.object, fb.UNKNOWN_OBJECT)
    if not configuration_valid(state, robot, obj):
        return state, fb.PickFailed(action.object, fb.INVALID_CONFIGURATION)
    reach = check_reach(robot, obj.pose)
    if not reach.ok:
        if robot.mobile:
            return state, fb.PickFailed(action.object, fb.TOO_FAR, reach.distance, reach.dx, reach.dy)
        return state, fb.PickFailed(action.object, fb.TOO_FAR, reach.distance)
    new = state.copy()
    held = new.objects[obj.id]
    host = new.furniture[held.support.parent]
    if held.support.relation == "on":
        host.surface_object_ids.remove(obj.id)
    else:
        host.contained_object_ids.remove(obj.id)
    held.support = Support("held", robot_id)
    held.pose = Pose2D(robot.base_pose.x, robot.base_pose.y)
    new.robots[robot_id].gripper = obj.id
    return new, fb.PickSuccess(obj.id)


def _place(state: WorldState, robot_id: str, action: Place):
    robot = state.robots[robot_id]
    if robot.gripper is None:
        return state, fb.PlaceFailed(action.object, action.destination, fb.GRIPPER_EMPTY)
    if robot.gripper != action.object:
        return state, fb.PlaceFailed(
            action.object, action.destination, fb.OBJECT_MISMATCH, f"holding {robot.gripper}"
        )
    if action.destination in state.zones and robot.mobile:
        return state, fb.PlaceFailed(
            action.object, action.destination, fb.ROLE_ILLEGAL,
            "tabletop zones are operated by the manipulation robot",
        )
    spot = placement_for(state, robot, action.destination)
    if spot is None:
        return state, fb.PlaceFailed(action.object, action.destination, fb.NOT_AT_TARGET, "unknown destination")
    host = state.furniture[spot.furniture_id]
    if spot.relation == "in" and not host.is_open:
        return state, fb.PlaceFailed(action.object, action.destination, fb.NOT_AT_TARGET, f"{host.id} is closed")
    reach = check_reach(robot, spot.pose)
    if not reach.ok:
        return state, fb.PlaceFailed(
            action.object, action.destination, fb.NOT_AT_TARGET,
            f"release point is {reach.distance:.2f} m away, beyond reach",
        )
    new = state.copy()
    obj = new.objects[action.object]
    new_host = new.furniture[spot.furniture_id]
    if spot.relation == "on":
        new_host.surface_object_ids.append(obj.id)
    else:
        new_host.contained_object_ids.append(obj.id)
    obj.support = Support(spot.relation, spot.furniture_id, spot.zone_id)  # type: ignore[arg-type]
    obj.pose = spot.pose
    new.robots[robot_id].gripper = None
    return new, fb.PlaceSuccess(obj.id, action.destination, spot.pose, spot.furniture_id, spot.relation)


def _idle_feedback(state: WorldState, robot_id: str, task, note: str = "") -> fb.Feedback:
    if task is not None and state.robots[robot_id].role == "manipulation":
        return fb.task_status(state, task)
    return fb.WaitAck(note)


def execute(
    state: WorldState,
    robot_id: str,
    action: Action,
    *,
    task=None,
    known: Optional[set[str]] = None,
    bus: Optional[MessageBus] = None,
):
    """Apply ``action`` for ``robot_id``; return ``(state', feedback)``.

    ``known`` is the acting robot's set of scene-graph entity ids; a pick of an
    object outside it fails as unknown.  ``bus`` receives SendMessage payloads.
    When ``task`` is given, the manipulation robot's idle actions (wait, send)
    report task status instead of a bare acknowledgment.
    """
    robot = state.robots[robot_id]
    if not isinstance(action, LEGAL_ACTIONS[robot.role]):
        return state, _illegal_feedback(action, robot.role)
    if isinstance(action, Navigate):
        return _navigate(state, robot_id, action)
    if isinstance(action, Move):
        return apply_move(state, robot_id, action.dx, action.dy)
    if isinstance(action, Open):
        return _open(state, robot_id, action)
    if isinstance(action, Pick):
        return _pick(state, robot_id, action, known)
    if isinstance(action, Place):
        return _place(state, robot_id, action)
    if isinstance(action, SendMessage):
        note = ""
        if bus is not None:
            try:
                bus.send(Message(robot_id, action.recipient, state.step, action.payload))
            except (UnknownRecipient, ValueError):
                note = f"message not delivered: unknown recipient {action.recipient}"
        return state, _idle_feedback(state, robot_id, task, note)
    if isinstance(action, Wait):
        return state, _idle_feedback(state, robot_id, task)
    raise TypeError(f"not an action: {action!r}")
