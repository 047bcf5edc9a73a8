"""Build task instances from room layouts with seeded object placement.

A layout file is a scenario without objects, zones or task, plus three extra keys:

    work_table   id of the table the manipulation robot works at
    zone_slots   {"tray": [x, y], "cutting_board": [x, y], "panels": {color: [x, y]}}
    spawn_spots  {"near": [...], "far": [...], "explore": [...]}, each spot
                 {"furniture": id, "x": x, "y": y}

``near`` spots are on the work table within the manipulation robot's reach,
``far`` spots are on the work table beyond it, ``explore`` spots are elsewhere
(on other surfaces or inside closed containers).  Every instance gets at least
one far object and at least one object that has to be found.
"""

from __future__ import annotations

import copy
import json
import random
from importlib import resources
from pathlib import Path
from typing import Any

from collabsim.codec import encode
from collabsim.tasks import (
    PACK_VOCABULARY,
    SANDWICH_FILLINGS,
    SOLID_COLORS,
    SOLID_SHAPES,
    MakeSandwich,
    PackObjects,
    SortSolids,
)
from collabsim.world.scenario import Scenario, dumps, scenario_from_dict

LAYOUT_KEYS = ("work_table", "zone_slots", "spawn_spots")
LAYOUT_NAMES = ("open_plan", "two_rooms", "l_shaped")
TASK_NAMES = ("pack_objects", "sort_solids", "make_sandwich")
OBJECT_COUNTS = (3, 4, 5, 6)


def layout_path(name: str) -> Path:
    return Path(str(resources.files("collabsim") / "scenarios" / "layouts" / f"{name}.json"))


def instance_dir() -> Path:
    return Path(str(resources.files("collabsim") / "scenarios" / "instances"))


def instance_path(layout: str, task: str, n_objects: int) -> Path:
    return instance_dir() / f"{layout}__{task}__{n_objects}.json"


def load_layout(name_or_path: str | Path) -> dict[str, Any]:
    path = Path(name_or_path)
    if not path.exists():
        path = layout_path(str(name_or_path))
    return json.loads(path.read_text(encoding="utf-8"))


def category_mix(n_objects: int) -> tuple[int, int, int]:
    """(explore, far, near) object counts for an instance of ``n_objects``."""
    if not 3 <= n_objects <= 6:
        raise ValueError("instances hold 3 to 6 task objects")
    n_explore = 1 if n_objects <= 4 else 2
    n_far = 1 if n_objects <= 5 else 2
    return n_explore, n_far, n_objects - n_explore - n_far


def _task_objects(task: str, n: int, rng: random.Random):
    """Return (objects as (id, display, category, color), task spec, zones)."""
    if task == "pack_objects":
        names = rng.sample(PACK_VOCABULARY, n)
        objs = [(name, name.replace("_", " "), name, None) for name in names]
        return objs, PackObjects(tuple(names), "tray")
    if task == "sort_solids":
        colors = sorted(rng.sample(SOLID_COLORS, n), key=SOLID_COLORS.index)
        shapes = rng.sample(SOLID_SHAPES, n)
        objs = [(f"{c}_{s}", f"{c} {s}", "solid", c) for c, s in zip(colors, shapes)]
        return objs, SortSolids(tuple((oid, f"{c}_panel") for (oid, _, _, c) in objs))
    if task == "make_sandwich":
        fillings = rng.sample(SANDWICH_FILLINGS, n - 2)
        ids = ["bread_slice_1", *fillings, "bread_slice_2"]
        objs = []
        for oid in ids:
            category = "bread_slice" if oid.startswith("bread") else oid
            objs.append((oid, category.replace("_", " "), category, None))
        return objs, MakeSandwich(tuple(ids), "cutting_board")
    raise ValueError(f"unknown task {task!r}")


def _zones(task_spec, layout: dict[str, Any]) -> list[dict[str, Any]]:
    slots = layout["zone_slots"]
    table = layout["work_table"]
    if isinstance(task_spec, PackObjects):
        return [{"id": "tray", "furniture": table, "kind": "tray", "center": slots["tray"], "half_extent": 0.15, "color": None}]
    if isinstance(task_spec, MakeSandwich):
        return [
            {"id": "cutting_board", "furniture": table, "kind": "cutting_board",
             "center": slots["cutting_board"], "half_extent": 0.12, "color": None}
        ]
    zones = []
    for color in SOLID_COLORS:
        if any(panel == f"{color}_panel" for _, panel in task_spec.assignments):
            zones.append({"id": f"{color}_panel", "furniture": table, "kind": "panel",
                          "center": slots["panels"][color], "half_extent": 0.1, "color": color})
    return zones


def generate_instance(layout: dict[str, Any], task: str, n_objects: int, seed: int = 0) -> Scenario:
    rng = random.Random(f"{layout['name']}/{task}/{n_objects}/{seed}")
    n_explore, n_far, n_near = category_mix(n_objects)
    objs, spec = _task_objects(task, n_objects, rng)
    order = list(range(n_objects))
    rng.shuffle(order)
    spots = layout["spawn_spots"]
    picks = (
        rng.sample(spots["explore"], n_explore)
        + rng.sample(spots["far"], n_far)
        + rng.sample(spots["near"], n_near)
    )
    openable = {f["id"]: f.get("openable", False) for f in layout["furniture"]}
    placed: list[dict[str, Any]] = [{}] * n_objects
    for slot, idx in zip(picks, order):
        oid, display, category, color = objs[idx]
        relation = "in" if openable[slot["furniture"]] else "on"
        placed[idx] = {
            "id": oid,
            "display_name": display,
            "category": category,
            "color": color,
            "pose": [slot["x"], slot["y"], 0.0],
            "support": {"relation": relation, "parent": slot["furniture"], "zone": None},
        }
    data = {k: copy.deepcopy(v) for k, v in layout.items() if k not in LAYOUT_KEYS}
    data["name"] = f"{layout['name']}__{task}__{n_objects}"
    data["zones"] = _zones(spec, layout)
    data["objects"] = placed
    data["task"] = encode(spec)
    return scenario_from_dict(data)


def write_instances(out_dir: str | Path | None = None, seed: int = 0) -> list[Path]:
    """Regenerate the full layout x task x object-count instance set."""
    out = Path(out_dir) if out_dir is not None else instance_dir()
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for layout_name in LAYOUT_NAMES:
        layout = load_layout(layout_name)
        for task in TASK_NAMES:
            for n in OBJECT_COUNTS:
                scenario = generate_instance(layout, task, n, seed)
                path = out / f"{layout_name}__{task}__{n}.json"
                path.write_text(dumps(scenario.state, scenario.task), encoding="utf-8")
                written.append(path)
    return written


def shipped_instances() -> list[Path]:
    return [instance_path(l, t, n) for l in LAYOUT_NAMES for t in TASK_NAMES for n in OBJECT_COUNTS]
