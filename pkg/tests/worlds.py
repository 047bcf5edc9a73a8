"""Small hand-built worlds shared by the tests."""

from __future__ import annotations

import copy
import math
from typing import Any

from collabsim.world.scenario import Scenario, scenario_from_dict

HALF_PI = math.pi / 2

# 4 m x 3 m room.  A walled pocket in the south-east corner holds the safe's only
# nav target, so navigating there has no path.
TINY: dict[str, Any] = {
    "name": "tiny",
    "grid": {
        "resolution": 0.1,
        "width": 40,
        "height": 30,
        "obstacle_rects": [
            [3.2, 0.1, 3.9, 0.2],
            [3.2, 0.7, 3.9, 0.8],
            [3.2, 0.1, 3.3, 0.8],
            [3.8, 0.1, 3.9, 0.8],
        ],
    },
    "furniture": [
        {"id": "work_table", "kind": "table", "footprint": [0.5, 1.0, 2.5, 1.5],
         "nav_targets": [[1.0, 0.6, HALF_PI], [2.9, 1.25, math.pi]]},
        {"id": "fridge", "kind": "fridge", "footprint": [3.2, 2.2, 3.8, 2.8], "openable": True,
         "nav_targets": [[2.8, 2.5, 0.0]]},
        {"id": "shelf", "kind": "counter", "footprint": [0.2, 2.4, 1.0, 2.8],
         "nav_targets": [[0.6, 2.1, HALF_PI]]},
        {"id": "safe", "kind": "cabinet", "footprint": [3.6, 0.4, 3.7, 0.5], "openable": True,
         "nav_targets": [[3.45, 0.45, 0.0]]},
    ],
    "zones": [
        {"id": "tray", "furniture": "work_table", "kind": "tray", "center": [1.5, 1.25],
         "half_extent": 0.15, "color": None},
    ],
    "objects": [
        {"id": "apple", "display_name": "apple", "category": "apple", "color": None,
         "pose": [3.5, 2.5, 0.0], "support": {"relation": "in", "parent": "fridge", "zone": None}},
        {"id": "cup", "display_name": "cup", "category": "cup", "color": None,
         "pose": [1.9, 1.1, 0.0], "support": {"relation": "on", "parent": "work_table", "zone": None}},
        {"id": "book", "display_name": "book", "category": "book", "color": None,
         "pose": [0.6, 2.6, 0.0], "support": {"relation": "on", "parent": "shelf", "zone": None}},
        {"id": "bowl", "display_name": "bowl", "category": "bowl", "color": None,
         "pose": [2.4, 1.4, 0.0], "support": {"relation": "on", "parent": "work_table", "zone": None}},
    ],
    "robots": [
        {"id": "alice", "role": "mobile_manipulation", "base_pose": [1.0, 0.6, HALF_PI], "reach_radius": 0.85},
        {"id": "bob", "role": "manipulation", "base_pose": [1.5, 0.75, HALF_PI], "reach_radius": 0.7},
        {"id": "david", "role": "mobile", "base_pose": [2.0, 2.0, 0.0], "reach_radius": None},
    ],
    "task": {"type": "pack_objects", "object_ids": ["apple", "cup", "book"], "tray_id": "tray"},
}


def tiny_dict(**overrides: Any) -> dict[str, Any]:
    data = copy.deepcopy(TINY)
    data.update(overrides)
    return data


def tiny_scenario(**overrides: Any) -> Scenario:
    return scenario_from_dict(tiny_dict(**overrides))
