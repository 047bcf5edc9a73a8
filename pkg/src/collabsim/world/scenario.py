"""Scenario files: JSON documents describing a complete initial world plus its task.

Schema (top-level keys)::

    name        scenario name
    grid        {resolution, width, height, rows | obstacle_rects + obstacle_cells}
                rows are strings, top row (largest y) first, '#' occupied, '.' free
    thresholds  {open_radius, pose_tolerance, angle_tolerance, view_radius, place_inset}
    furniture   [{id, kind, footprint: [xmin, ymin, xmax, ymax], openable, is_open,
                  nav_targets: [[x, y, theta], ...], surface_objects, contained_objects}]
    zones       [{id, furniture, kind, center: [x, y], half_extent, color}]
    objects     [{id, display_name, category, color, pose: [x, y, theta],
                  support: {relation, parent, zone}}]
    robots      [{id, role, base_pose: [x, y, theta], reach_radius, gripper}]
    task        tagged task record or null

Furniture footprints are always rasterised into the occupancy grid.  Saving always
writes explicit ``rows`` and explicit furniture object lists, so load -> save ->
load is exact.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Optional

from collabsim.codec import decode, encode
from collabsim.tasks import TaskSpec, validate_task
from collabsim.world.geometry import GridMap, Pose2D
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


@dataclass
class Scenario:
    state: WorldState
    task: Optional[TaskSpec]
    content_hash: str = ""
    path: Optional[Path] = None

    @property
    def name(self) -> str:
        return self.state.name


def content_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _grid_from_dict(g: dict[str, Any], furniture: list[Furniture]) -> GridMap:
    resolution = float(g.get("resolution", 0.1))
    if "rows" in g:
        grid = GridMap.from_rows(list(g["rows"]), resolution)
    else:
        grid = GridMap.empty(int(g["width"]), int(g["height"]), resolution)
        cells = []
        for rect in g.get("obstacle_rects", []):
            cells.extend(grid.rect_cells(tuple(rect)))
        cells.extend((int(r), int(c)) for r, c in g.get("obstacle_cells", []))
        grid = grid.with_occupied(cells)
    if "width" in g and (grid.width != int(g["width"]) or grid.height != int(g["height"])):
        raise ScenarioInvalid("grid rows disagree with declared width/height")
    cells = []
    for f in furniture:
        cells.extend(grid.rect_cells(f.footprint))
    return grid.with_occupied(cells)


def scenario_from_dict(data: dict[str, Any]) -> Scenario:
    try:
        furniture = [
            Furniture(
                id=f["id"],
                kind=f["kind"],
                footprint=tuple(float(v) for v in f["footprint"]),
                openable=bool(f.get("openable", False)),
                is_open=bool(f.get("is_open", False)),
                nav_targets=tuple(Pose2D.from_list(p) for p in f["nav_targets"]),
                surface_object_ids=list(f.get("surface_objects", [])),
                contained_object_ids=list(f.get("contained_objects", [])),
            )
            for f in data["furniture"]
        ]
        explicit_lists = all("surface_objects" in f for f in data["furniture"])
        zones = [
            Zone(
                id=z["id"],
                furniture_id=z["furniture"],
                kind=z["kind"],
                center=(float(z["center"][0]), float(z["center"][1])),
                half_extent=float(z.get("half_extent", 0.1)),
                color=z.get("color"),
            )
            for z in data.get("zones", [])
        ]
        objects = [
            SimObject(
                id=o["id"],
                display_name=o.get("display_name", o["id"].replace("_", " ")),
                category=o["category"],
                color=o.get("color"),
                pose=Pose2D.from_list(o["pose"]),
                support=Support(o["support"]["relation"], o["support"]["parent"], o["support"].get("zone")),
            )
            for o in data.get("objects", [])
        ]
        robots = [
            Robot(
                id=r["id"],
                role=r["role"],
                base_pose=Pose2D.from_list(r["base_pose"]),
                reach_radius=r.get("reach_radius"),
                gripper=r.get("gripper"),
            )
            for r in data["robots"]
        ]
        thresholds = Thresholds(**data.get("thresholds", {}))
        grid = _grid_from_dict(data["grid"], furniture)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioInvalid):
            raise
        raise ScenarioInvalid(f"malformed scenario: {exc!r}") from exc

    by_id = {f.id: f for f in furniture}
    if not explicit_lists:
        for o in objects:
            host = by_id.get(o.support.parent)
            if host is None:
                continue
            (host.surface_object_ids if o.support.relation == "on" else host.contained_object_ids).append(o.id)

    for label, items in (("furniture", furniture), ("zone", zones), ("object", objects), ("robot", robots)):
        ids = [item.id for item in items]
        if len(ids) != len(set(ids)):
            raise ScenarioInvalid(f"duplicate {label} ids")

    state = WorldState(
        grid=grid,
        furniture=by_id,
        zones={z.id: z for z in zones},
        objects={o.id: o for o in objects},
        robots={r.id: r for r in robots},
        thresholds=thresholds,
        name=data.get("name", ""),
    )
    task = decode(data["task"]) if data.get("task") else None
    problems = state.validate()
    if task is not None:
        problems += validate_task(state, task)
    if problems:
        raise ScenarioInvalid("; ".join(problems))
    return Scenario(state, task)


def scenario_to_dict(state: WorldState, task: Optional[TaskSpec]) -> dict[str, Any]:
    return {
        "name": state.name,
        "grid": {
            "resolution": state.grid.resolution,
            "width": state.grid.width,
            "height": state.grid.height,
            "rows": state.grid.to_rows(),
        },
        "thresholds": asdict(state.thresholds),
        "furniture": [
            {
                "id": f.id,
                "kind": f.kind,
                "footprint": list(f.footprint),
                "openable": f.openable,
                "is_open": f.is_open,
                "nav_targets": [p.as_list() for p in f.nav_targets],
                "surface_objects": list(f.surface_object_ids),
                "contained_objects": list(f.contained_object_ids),
            }
            for f in state.furniture.values()
        ],
        "zones": [
            {
                "id": z.id,
                "furniture": z.furniture_id,
                "kind": z.kind,
                "center": list(z.center),
                "half_extent": z.half_extent,
                "color": z.color,
            }
            for z in state.zones.values()
        ],
        "objects": [
            {
                "id": o.id,
                "display_name": o.display_name,
                "category": o.category,
                "color": o.color,
                "pose": o.pose.as_list(),
                "support": {"relation": o.support.relation, "parent": o.support.parent, "zone": o.support.zone},
            }
            for o in state.objects.values()
        ],
        "robots": [
            {
                "id": r.id,
                "role": r.role,
                "base_pose": r.base_pose.as_list(),
                "reach_radius": r.reach_radius,
                "gripper": r.gripper,
            }
            for r in state.robots.values()
        ],
        "task": encode(task) if task is not None else None,
    }


def dumps(state: WorldState, task: Optional[TaskSpec]) -> str:
    return json.dumps(scenario_to_dict(state, task), indent=2) + "\n"


def loads(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioInvalid(f"not valid JSON: {exc}") from exc
    scenario = scenario_from_dict(data)
    scenario.content_hash = content_hash(text.encode())
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    raw = path.read_bytes()
    scenario = loads(raw.decode("utf-8"))
    scenario.content_hash = content_hash(raw)
    scenario.path = path
    return scenario


def save_scenario(scenario: Scenario, path: str | Path) -> str:
    text = dumps(scenario.state, scenario.task)
    Path(path).write_text(text, encoding="utf-8")
    return content_hash(text.encode())
