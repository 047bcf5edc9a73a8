"""Per-robot belief about furniture and objects.

Updates are last-writer-wins on the global event order ``(step, robot rank)``,
where rank follows the fixed turn order alice < bob < david.  Own feedback about
the robot's own gripper is never overridden by a message.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Iterable, Optional

from collabsim import ROBOT_ORDER
from collabsim import feedback as fb
from collabsim.comms import LocationReport, Message, TaskStatusShare, sender_rank
from collabsim.world.geometry import Pose2D
from collabsim.world.state import WorldState


class UnknownEntity(KeyError):
    pass


@dataclass
class SceneNode:
    entity_id: str
    kind: str  # furniture | zone | object
    pose: Pose2D
    last_updated_step: int = 0
    open_state: Optional[bool] = None
    contents_known: bool = False
    category: str = ""
    color: Optional[str] = None
    nav_targets: tuple[Pose2D, ...] = ()
    parent: Optional[str] = None  # zone -> host furniture
    updated_rank: int = -1


@dataclass(frozen=True)
class SceneRelation:
    relation: str  # on | in | held
    parent: str


@dataclass
class SceneGraph:
    owner: str
    nodes: dict[str, SceneNode] = field(default_factory=dict)
    relations: dict[str, SceneRelation] = field(default_factory=dict)

    @classmethod
    def initial(cls, state: WorldState, owner: str) -> SceneGraph:
        """Static furniture and zone nodes only; objects must be discovered."""
        graph = cls(owner)
        for fid, f in state.furniture.items():
            cx, cy = f.center
            graph.nodes[fid] = SceneNode(
                entity_id=fid,
                kind="furniture",
                pose=Pose2D(cx, cy),
                open_state=f.is_open if f.openable else None,
                contents_known=not f.openable,
                category=f.kind,
                nav_targets=f.nav_targets,
            )
        for zid, z in state.zones.items():
            graph.nodes[zid] = SceneNode(
                entity_id=zid,
                kind="zone",
                pose=Pose2D(*z.center),
                category=z.kind,
                color=z.color,
                parent=z.furniture_id,
            )
        return graph

    def copy(self) -> SceneGraph:
        return copy.deepcopy(self)

    def triples(self) -> set[tuple[str, str, str]]:
        return {(child, rel.relation, rel.parent) for child, rel in self.relations.items()}

    def objects(self) -> list[SceneNode]:
        return [n for _, n in sorted(self.nodes.items()) if n.kind == "object"]

    def known_ids(self) -> set[str]:
        return set(self.nodes)

    def location_of(self, object_id: str) -> Optional[SceneRelation]:
        return self.relations.get(object_id)

    def host_furniture(self, object_id: str) -> Optional[str]:
        """Furniture currently believed to support an object (zones resolve to their host)."""
        rel = self.relations.get(object_id)
        if rel is None or rel.relation == "held":
            return None
        node = self.nodes.get(rel.parent)
        if node is not None and node.kind == "zone":
            return node.parent
        return rel.parent

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SceneGraph):
            return NotImplemented
        return self.owner == other.owner and self.nodes == other.nodes and self.relations == other.relations


def _rank_of(owner: str) -> int:
    return ROBOT_ORDER.index(owner) if owner in ROBOT_ORDER else len(ROBOT_ORDER)


def _newer(node: SceneNode, step: int, rank: int) -> bool:
    return (step, rank) >= (node.last_updated_step, node.updated_rank)


def _put_object(
    graph: SceneGraph,
    object_id: str,
    pose: Pose2D,
    relation: Optional[SceneRelation],
    step: int,
    rank: int,
    category: str = "",
    color: Optional[str] = None,
) -> None:
    node = graph.nodes.get(object_id)
    if node is not None and node.kind != "object":
        raise UnknownEntity(f"{object_id} is not an object")
    if relation is not None and relation.relation != "held" and relation.parent not in graph.nodes:
        raise UnknownEntity(relation.parent)
    if node is None:
        node = SceneNode(object_id, "object", pose, step, category=category, color=color, updated_rank=rank)
        graph.nodes[object_id] = node
    elif not _newer(node, step, rank):
        return
    node.pose = pose
    node.last_updated_step = step
    node.updated_rank = rank
    if category:
        node.category = category
    if color is not None:
        node.color = color
    if relation is None:
        graph.relations.pop(object_id, None)
    else:
        graph.relations[object_id] = relation


def _relation_for(graph: SceneGraph, furniture_id: str, zone: Optional[str], relation: str) -> SceneRelation:
    if zone is not None and zone in graph.nodes:
        return SceneRelation("on", zone)
    return SceneRelation(relation, furniture_id)


def _apply_sightings(
    graph: SceneGraph,
    sightings: Iterable[fb.ObjectSighting],
    step: int,
    rank: int,
    covering: Optional[tuple[str, str]] = None,
) -> None:
    """Insert sighted objects.  ``covering`` = (furniture, relation) marks a complete
    listing of that furniture: believed members missing from it lose their relation."""
    seen = set()
    for s in sightings:
        seen.add(s.object_id)
        rel = _relation_for(graph, s.furniture_id, s.zone, s.relation)
        _put_object(graph, s.object_id, s.pose, rel, step, rank, s.category, s.color)
    if covering is not None:
        fid, relation = covering
        for child, rel in list(graph.relations.items()):
            if child in seen or rel.relation == "held":
                continue
            host = graph.host_furniture(child)
            if host == fid and (rel.relation == relation or graph.nodes[rel.parent].kind == "zone"):
                node = graph.nodes[child]
                if _newer(node, step, rank):
                    del graph.relations[child]
                    node.last_updated_step = step
                    node.updated_rank = rank


def update_from_feedback(graph: SceneGraph, feedback: fb.Feedback, step: int) -> SceneGraph:
    """Fold the owner's own execution feedback into a copy of the graph."""
    if fb.is_failure(feedback) or isinstance(feedback, (fb.TaskStatus, fb.WaitAck, fb.MoveSuccess)):
        return graph
    out = graph.copy()
    rank = _rank_of(graph.owner)
    if isinstance(feedback, fb.NavigationSuccess):
        node = out.nodes.get(feedback.target)
        if node is None or node.kind != "furniture":
            raise UnknownEntity(feedback.target)
        if feedback.surface_objects is not None:
            _apply_sightings(out, feedback.surface_objects, step, rank, covering=(feedback.target, "on"))
        return out
    if isinstance(feedback, fb.OpenSuccess):
        node = out.nodes.get(feedback.furniture)
        if node is None or node.kind != "furniture":
            raise UnknownEntity(feedback.furniture)
        node.open_state = True
        node.contents_known = True
        _apply_sightings(out, feedback.contents, step, rank, covering=(feedback.furniture, "in"))
        return out
    if isinstance(feedback, fb.PickSuccess):
        node = out.nodes.get(feedback.object)
        if node is None:
            raise UnknownEntity(feedback.object)
        _put_object(out, feedback.object, node.pose, SceneRelation("held", graph.owner), step, rank)
        return out
    if isinstance(feedback, fb.PlaceSuccess):
        if feedback.object not in out.nodes:
            raise UnknownEntity(feedback.object)
        if feedback.location in out.nodes and out.nodes[feedback.location].kind == "zone":
            rel = SceneRelation("on", feedback.location)
        else:
            rel = SceneRelation(feedback.relation, feedback.furniture_id or feedback.location)
        _put_object(out, feedback.object, feedback.pose, rel, step, rank)
        return out
    raise TypeError(f"not a feedback value: {feedback!r}")


def update_from_observation(graph: SceneGraph, sightings: Iterable[fb.ObjectSighting], step: int) -> SceneGraph:
    """Fold a local surface view into a copy of the graph (no deletions)."""
    sightings = tuple(sightings)
    if not sightings:
        return graph
    out = graph.copy()
    _apply_sightings(out, sightings, step, _rank_of(graph.owner))
    return out


def update_from_message(graph: SceneGraph, message: Message) -> SceneGraph:
    payload = message.payload
    if isinstance(payload, TaskStatusShare) or not isinstance(payload, LocationReport):
        return graph
    fid = payload.furniture_id
    host = graph.nodes.get(fid)
    if host is None or host.kind not in ("furniture", "zone"):
        return graph
    current = graph.relations.get(payload.object_name)
    if current is not None and current.relation == "held" and current.parent == graph.owner:
        return graph
    out = graph.copy()
    if host.kind == "zone":
        rel = SceneRelation("on", fid)
    else:
        rel = SceneRelation("in" if host.open_state is not None else "on", fid)
        if host.open_state is not None:
            out.nodes[fid].contents_known = True
    _put_object(out, payload.object_name, payload.pose, rel, message.sent_step, sender_rank(message.sender))
    return out


def _fmt(p: Pose2D) -> str:
    return f"({p.x:.2f}, {p.y:.2f})"


def render(graph: SceneGraph) -> str:
    lines = ["Furniture:"]
    for fid, node in sorted(graph.nodes.items()):
        if node.kind != "furniture":
            continue
        parts = [f"- {fid} ({node.category}) at {_fmt(node.pose)}"]
        if node.open_state is not None:
            state = "open" if node.open_state else "closed"
            known = "contents known" if node.contents_known else "contents unknown"
            parts.append(f"{state}, {known}")
        navs = ", ".join(f"{fid}[{i}] {_fmt(p)}" for i, p in enumerate(node.nav_targets))
        parts.append(f"nav targets: {navs}")
        lines.append("; ".join(parts))
    zones = [(zid, n) for zid, n in sorted(graph.nodes.items()) if n.kind == "zone"]
    if zones:
        lines.append("Zones:")
        for zid, node in zones:
            label = f"{node.color} {node.category}" if node.color else node.category
            lines.append(f"- {zid} ({label}) on {node.parent} at {_fmt(node.pose)}")
    lines.append("Objects:")
    objects = graph.objects()
    if not objects:
        lines.append("- no objects discovered yet")
    for node in objects:
        rel = graph.relations.get(node.entity_id)
        if rel is None:
            where = "location unknown"
        elif rel.relation == "held":
            where = f"held by {rel.parent}"
        else:
            where = f"{rel.relation} {rel.parent}"
        lines.append(f"- {node.entity_id}: {where}, last seen at {_fmt(node.pose)} (step {node.last_updated_step})")
    return "\n".join(lines)
