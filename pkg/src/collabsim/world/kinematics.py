"""Arm reach and placement abstractions standing in for arm trajectory planning."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from collabsim.world.geometry import Pose2D
from collabsim.world.state import Robot, SimObject, WorldState


@dataclass(frozen=True)
class ReachResult:
    ok: bool
    distance: float
    dx: float
    dy: float


def check_reach(robot: Robot, target_pose: Pose2D) -> ReachResult:
    """Planar reach test from the robot base.  dx, dy are world-frame offsets base -> target."""
    if robot.reach_radius is None:
        raise ValueError(f"{robot.id} has no arm")
    dx = target_pose.x - robot.base_pose.x
    dy = target_pose.y - robot.base_pose.y
    distance = math.hypot(dx, dy)
    return ReachResult(distance <= robot.reach_radius, distance, dx, dy)


def configuration_valid(state: WorldState, robot: Robot, obj: SimObject) -> bool:
    """Reject grasp targets the arm planner could never reach: inside closed furniture or in another gripper."""
    sup = obj.support
    if sup.relation == "held":
        return sup.parent == robot.id
    if sup.relation == "in":
        return state.furniture[sup.parent].is_open
    return True


@dataclass(frozen=True)
class Placement:
    furniture_id: str
    zone_id: Optional[str]
    relation: str
    pose: Pose2D


def placement_for(state: WorldState, robot: Robot, destination: str) -> Optional[Placement]:
    """Where a released object would come to rest, or None for an unknown destination.

    Zones put the object at the zone center.  Open containers put it at their
    center.  Other furniture surfaces put it at the footprint point nearest to
    the robot base, pulled ``place_inset`` meters inside the edge.
    """
    zone = state.zones.get(destination)
    if zone is not None:
        cx, cy = zone.center
        return Placement(zone.furniture_id, zone.id, "on", Pose2D(cx, cy))
    host = state.furniture.get(destination)
    if host is None:
        return None
    if host.openable:
        cx, cy = host.center
        return Placement(host.id, None, "in", Pose2D(cx, cy))
    x0, y0, x1, y1 = host.footprint
    inset = state.thresholds.place_inset
    bx, by = robot.base_pose.x, robot.base_pose.y
    px = min(max(bx, x0 + inset), x1 - inset)
    py = min(max(by, y0 + inset), y1 - inset)
    return Placement(host.id, None, "on", Pose2D(px, py))
