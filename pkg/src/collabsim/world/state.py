"""Ground-truth world model: furniture, tabletop zones, objects and robots."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from typing import Literal, Optional

from collabsim import ROBOT_ORDER
from collabsim.world.geometry import GridMap, Pose2D, rect_contains

Rect = tuple[float, float, float, float]

FURNITURE_KINDS = ("table", "counter", "fridge", "cabinet", "drawer", "microwave", "tray-stand")
ZONE_KINDS = ("tray", "panel", "cutting_board")
COLORS = ("red", "blue", "pink", "green", "yellow", "purple")
ROLES = ("mobile", "manipulation", "mobile_manipulation")

# The team roster is fixed: David drives, Bob is a fixed arm, Alice does both.
ROLE_OF = {"alice": "mobile_manipulation", "bob": "manipulation", "david": "mobile"}

Relation = Literal["on", "in", "held"]


class ScenarioInvalid(ValueError):
    """A world state or scenario file violates a structural invariant."""


@dataclass(frozen=True)
class Support:
    relation: Relation
    parent: str
    zone: Optional[str] = None


@dataclass
class Furniture:
    id: str
    kind: str
    footprint: Rect
    openable: bool
    nav_targets: tuple[Pose2D, ...]
    is_open: bool = False
    surface_object_ids: list[str] = field(default_factory=list)
    contained_object_ids: list[str] = field(default_factory=list)

    @property
    def center(self) -> tuple[float, float]:
        x0, y0, x1, y1 = self.footprint
        return ((x0 + x1) / 2.0, (y0 + y1) / 2.0)


@dataclass(frozen=True)
class Zone:
    """Named tabletop region (tray, colored panel, cutting board) on a piece of furniture."""

    id: str
    furniture_id: str
    kind: str
    center: tuple[float, float]
    half_extent: float = 0.1
    color: Optional[str] = None

    @property
    def rect(self) -> Rect:
        cx, cy = self.center
        h = self.half_extent
        return (cx - h, cy - h, cx + h, cy + h)

    def contains(self, x: float, y: float) -> bool:
        return rect_contains(self.rect, x, y)


@dataclass
class SimObject:
    id: str
    display_name: str
    category: str
    pose: Pose2D
    support: Support
    color: Optional[str] = None


@dataclass
class Robot:
    id: str
    role: str
    base_pose: Pose2D
    reach_radius: Optional[float] = None
    gripper: Optional[str] = None

    @property
    def mobile(self) -> bool:
        return self.role in ("mobile", "mobile_manipulation")

    @property
    def can_manipulate(self) -> bool:
        return self.role in ("manipulation", "mobile_manipulation")


@dataclass(frozen=True)
class Thresholds:
    open_radius: float = 1.0
    pose_tolerance: float = 0.10
    angle_tolerance: float = 0.17
    view_radius: float = 1.5
    place_inset: float = 0.05


@dataclass
class WorldState:
    grid: GridMap
    furniture: dict[str, Furniture]
    zones: dict[str, Zone]
    objects: dict[str, SimObject]
    robots: dict[str, Robot]
    thresholds: Thresholds = field(default_factory=Thresholds)
    step: int = 0
    name: str = ""

    def copy(self) -> WorldState:
        """Deep copy sharing the (read-only) grid."""
        return WorldState(
            grid=self.grid,
            furniture=copy.deepcopy(self.furniture),
            zones=dict(self.zones),
            objects=copy.deepcopy(self.objects),
            robots=copy.deepcopy(self.robots),
            thresholds=self.thresholds,
            step=self.step,
            name=self.name,
        )

    def robot_order(self) -> list[str]:
        return [r for r in ROBOT_ORDER if r in self.robots]

    def zone_stack(self, zone_id: str) -> list[str]:
        """Objects resting in a zone, bottom to top (placement order)."""
        zone = self.zones[zone_id]
        host = self.furniture[zone.furniture_id]
        return [
            oid
            for oid in host.surface_object_ids
            if self.objects[oid].support.zone == zone_id
        ]

    def dynamic_dict(self) -> dict:
        """Everything that can change during an episode, in canonical form."""
        return {
            "step": self.step,
            "furniture": {
                fid: {
                    "is_open": f.is_open,
                    "surface": list(f.surface_object_ids),
                    "contained": list(f.contained_object_ids),
                }
                for fid, f in sorted(self.furniture.items())
            },
            "objects": {
                oid: {
                    "pose": o.pose.as_list(),
                    "support": [o.support.relation, o.support.parent, o.support.zone],
                }
                for oid, o in sorted(self.objects.items())
            },
            "robots": {
                rid: {"pose": r.base_pose.as_list(), "gripper": r.gripper}
                for rid, r in sorted(self.robots.items())
            },
        }

    def state_hash(self) -> str:
        blob = json.dumps(self.dynamic_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def validate(self) -> list[str]:
        """Return invariant violations; empty when the state is consistent."""
        problems: list[str] = []
        grid = self.grid
        for fid, f in self.furniture.items():
            if f.id != fid:
                problems.append(f"furniture key {fid} != id {f.id}")
            if f.kind not in FURNITURE_KINDS:
                problems.append(f"{fid}: unknown kind {f.kind}")
            if not f.nav_targets:
                problems.append(f"{fid}: needs at least one nav target")
            for i, nav in enumerate(f.nav_targets):
                try:
                    cell = grid.world_to_cell(nav.x, nav.y)
                except ValueError:
                    problems.append(f"{fid}: nav target {i} outside map")
                    continue
                if not grid.is_free(cell):
                    problems.append(f"{fid}: nav target {i} on an occupied cell")
            if not f.openable and (f.is_open or f.contained_object_ids):
                problems.append(f"{fid}: non-openable furniture cannot be open or hold contents")
            both = set(f.surface_object_ids) & set(f.contained_object_ids)
            if both:
                problems.append(f"{fid}: objects both on and in: {sorted(both)}")
        for zid, z in self.zones.items():
            if z.furniture_id not in self.furniture:
                problems.append(f"zone {zid}: unknown furniture {z.furniture_id}")
            if z.kind not in ZONE_KINDS:
                problems.append(f"zone {zid}: unknown kind {z.kind}")
            if z.color is not None and z.color not in COLORS:
                problems.append(f"zone {zid}: unknown color {z.color}")
        holders: dict[str, str] = {}
        for rid, r in self.robots.items():
            if rid not in ROBOT_ORDER:
                problems.append(f"unknown robot id {rid}")
            elif ROLE_OF[rid] != r.role:
                problems.append(f"{rid}: role must be {ROLE_OF[rid]}")
            if r.can_manipulate != (r.reach_radius is not None):
                problems.append(f"{rid}: reach_radius present iff the robot can manipulate")
            if r.gripper is not None:
                holders[r.gripper] = rid
        placement: dict[str, int] = {}
        for f in self.furniture.values():
            for oid in f.surface_object_ids + f.contained_object_ids:
                placement[oid] = placement.get(oid, 0) + 1
        for oid, o in self.objects.items():
            sup = o.support
            if o.color is not None and o.color not in COLORS:
                problems.append(f"{oid}: unknown color {o.color}")
            count = placement.get(oid, 0) + (1 if oid in holders else 0)
            if count != 1:
                problems.append(f"{oid}: must have exactly one support, found {count}")
            if sup.relation == "held":
                if holders.get(oid) != sup.parent:
                    problems.append(f"{oid}: held by {sup.parent} but gripper disagrees")
                continue
            host = self.furniture.get(sup.parent)
            if host is None:
                problems.append(f"{oid}: unknown support {sup.parent}")
                continue
            listing = host.surface_object_ids if sup.relation == "on" else host.contained_object_ids
            if oid not in listing:
                problems.append(f"{oid}: not listed by {sup.parent}")
            if sup.relation == "in" and not host.openable:
                problems.append(f"{oid}: inside non-openable {sup.parent}")
            if sup.zone is not None:
                zone = self.zones.get(sup.zone)
                if zone is None or zone.furniture_id != sup.parent:
                    problems.append(f"{oid}: bad zone {sup.zone}")
        for oid in placement:
            if oid not in self.objects:
                problems.append(f"furniture lists unknown object {oid}")
        for oid, rid in holders.items():
            if oid not in self.objects:
                problems.append(f"{rid} holds unknown object {oid}")
        return problems

    def check(self) -> None:
        problems = self.validate()
        if problems:
            raise ScenarioInvalid("; ".join(problems))
