"""Ground-truth environment, robot embodiments, action execution and navigation."""

from collabsim.world.geometry import Cell, GridMap, OutOfBounds, Pose2D
from collabsim.world.state import (
    Furniture,
    Robot,
    ScenarioInvalid,
    SimObject,
    Support,
    Thresholds,
    WorldState,
    Zone,
)
from collabsim.world.navigation import InvalidEndpoint, NoPath, PathResult, plan_path
from collabsim.world.actions import Action, Move, Navigate, Open, Pick, Place, SendMessage, Wait
from collabsim.world.kinematics import ReachResult, check_reach

__all__ = [
    "Action",
    "Cell",
    "Furniture",
    "GridMap",
    "InvalidEndpoint",
    "Move",
    "Navigate",
    "NoPath",
    "Open",
    "OutOfBounds",
    "PathResult",
    "Pick",
    "Place",
    "Pose2D",
    "ReachResult",
    "Robot",
    "ScenarioInvalid",
    "SendMessage",
    "SimObject",
    "Support",
    "Thresholds",
    "Wait",
    "WorldState",
    "Zone",
    "check_reach",
    "plan_path",
]
