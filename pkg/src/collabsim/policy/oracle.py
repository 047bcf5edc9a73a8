"""Scripted ground-truth team policy.

The oracle knows the task definition but not where objects are; it explores,
talks and replans through exactly the same observation, message and feedback
channels a language model would get.  It exists to show that the environment,
feedback and protocol are sufficient to finish every shipped task.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from collabsim import feedback as fb
from collabsim.comms import DelegatedExplore, ExploreRequest, LocationReport, TransportRequest
from collabsim.policy.base import Observation, PolicyDecision, PromptBundle
from collabsim.scenegraph import SceneGraph
from collabsim.tasks import MakeSandwich
from collabsim.world.actions import Action, Move, Navigate, Open, Pick, Place, SendMessage, Wait, format_action
from collabsim.world.geometry import GridMap, OutOfBounds, Pose2D
from collabsim.world.navigation import PlanningError, plan_path

_AT = 1e-6


@dataclass
class OracleState:
    robot_id: str
    task: object
    # manipulation robot
    explore_requested: set[str] = field(default_factory=set)
    transport_requested: set[str] = field(default_factory=set)
    # mobile manipulation robot
    explore_wanted: list[str] = field(default_factory=list)
    transport_wanted: list[str] = field(default_factory=list)
    delegated: bool = False
    delivered: set[str] = field(default_factory=set)
    visited: set[str] = field(default_factory=set)
    pick_attempts: set[tuple[str, float, float]] = field(default_factory=set)
    bad_navs: dict[str, set[int]] = field(default_factory=dict)
    abandoned: set[str] = field(default_factory=set)
    # both mobile robots: (furniture, nav index) pairs a navigate could not reach
    unreachable: set[tuple[str, int]] = field(default_factory=set)
    # mobile robot
    queue: list[str] = field(default_factory=list)
    reported: set[str] = field(default_factory=set)
    thought: str = ""


def clip_move(grid: GridMap, base: Pose2D, dx: float, dy: float, min_step: float = 0.05) -> Optional[tuple[float, float]]:
    """Largest prefix of the displacement (cm-rounded) that ends on a reachable free cell."""
    dist = math.hypot(dx, dy)
    if dist < min_step:
        return None
    n = max(1, math.ceil(dist / (grid.resolution / 2.0)))
    for k in range(n, 0, -1):
        mx, my = round(dx * k / n, 2), round(dy * k / n, 2)
        if math.hypot(mx, my) < min_step:
            break
        try:
            plan_path(grid, base, base.translated(mx, my))
        except (PlanningError, OutOfBounds, ValueError):
            continue
        return (mx, my)
    return None


def _at(a: Pose2D, b: Pose2D) -> bool:
    return math.hypot(a.x - b.x, a.y - b.y) < _AT


def _work_table(graph: SceneGraph, task) -> str:
    zone = task.destination(task.object_order[0])
    return graph.nodes[zone].parent


def _placed(graph: SceneGraph, task, oid: str) -> bool:
    rel = graph.relations.get(oid)
    return rel is not None and rel.relation == "on" and rel.parent == task.destination(oid)


def _nearest_nav(graph: SceneGraph, fid: str, target: Pose2D, skip: set[int] = frozenset()) -> Optional[int]:
    navs = graph.nodes[fid].nav_targets
    options = [i for i in range(len(navs)) if i not in skip]
    if not options:
        return None
    return min(options, key=lambda i: (navs[i].distance_to(target), i))


def _at_nav_of(graph: SceneGraph, fid: str, pose: Pose2D) -> Optional[int]:
    for i, nav in enumerate(graph.nodes[fid].nav_targets):
        if _at(pose, nav):
            return i
    return None


def _blocked(st: OracleState, fid: str) -> set[int]:
    return {i for f, i in st.unreachable if f == fid}


def _note_navigation(st: OracleState, obs: Observation) -> None:
    """Record whether the previous navigate reached its target."""
    last = obs.memory.last_action() if obs.memory is not None else None
    if not isinstance(last, Navigate) or last.furniture not in obs.scene_graph.nodes:
        return
    navs = obs.scene_graph.nodes[last.furniture].nav_targets
    if 0 <= last.index < len(navs) and _at(obs.robot.base_pose, navs[last.index]):
        st.visited.add(last.furniture)
    else:
        st.unreachable.add((last.furniture, last.index))


def _send(st: OracleState, recipient: str, payload, why: str) -> Action:
    st.thought = why
    return SendMessage(recipient, payload)


def _act(st: OracleState, action: Action, why: str) -> Action:
    st.thought = why
    return action


# -- manipulation robot -----------------------------------------------------------------


def _bob_step(st: OracleState, obs: Observation) -> Action:
    g, me, task = obs.scene_graph, obs.robot, st.task
    order = task.object_order
    if all(_placed(g, task, o) for o in order):
        return _act(st, Wait(), "Every task object is at its destination; the task is complete.")
    if me.gripper is not None:
        dest = task.destination(me.gripper)
        return _act(st, Place(me.gripper, dest), f"I am holding {me.gripper}; it belongs on {dest}.")

    table = _work_table(g, task)
    helper = "alice" in obs.roster

    def on_table(o: str) -> bool:
        return g.host_furniture(o) == table and not _placed(g, task, o)

    def in_reach(o: str) -> bool:
        return me.base_pose.distance_to(g.nodes[o].pose) <= me.reach_radius

    unknown = [o for o in order if not _placed(g, task, o) and g.relations.get(o) is None]
    fresh = [o for o in unknown if o not in st.explore_requested]
    if fresh and helper:
        st.explore_requested.update(fresh)
        return _send(st, "alice", ExploreRequest(tuple(fresh)),
                     f"I cannot see {', '.join(fresh)}; asking alice to explore for them.")
    far = [o for o in order if on_table(o) and not in_reach(o) and o not in st.transport_requested]
    if far and helper:
        o = far[0]
        st.transport_requested.add(o)
        p = g.nodes[o].pose
        return _send(st, "alice", TransportRequest(o, f"on {table} at ({p.x:.2f}, {p.y:.2f}), beyond my reach"),
                     f"{o} is on the table but out of my reach; asking alice to bring it closer.")
    if isinstance(task, MakeSandwich):
        candidates = [next(o for o in order if not _placed(g, task, o))]
    else:
        candidates = [o for o in order if not _placed(g, task, o)]
    for o in candidates:
        if on_table(o) and in_reach(o):
            return _act(st, Pick(o), f"{o} is within reach and is next for the task.")
    return _act(st, Wait(), "Nothing I can place yet; waiting for deliveries.")


# -- mobile manipulation robot ---------------------------------------------------------------


def _alice_ingest(st: OracleState, obs: Observation) -> None:
    for msg in obs.new_messages:
        payload = msg.payload
        if isinstance(payload, ExploreRequest):
            st.explore_wanted.extend(n for n in payload.object_names if n not in st.explore_wanted)
        elif isinstance(payload, TransportRequest) and payload.object_name not in st.transport_wanted:
            st.transport_wanted.append(payload.object_name)
    last = obs.memory.last_action() if obs.memory is not None else None
    me = obs.robot
    if isinstance(last, Place) and me.gripper is None:
        st.delivered.add(last.object)
    _note_navigation(st, obs)


def _alice_job(st: OracleState, obs: Observation, o: str) -> Optional[Action]:
    g, me = obs.scene_graph, obs.robot
    host = g.host_furniture(o)
    if host is None:
        return None
    if g.nodes[host].open_state is False:
        action = _explore_furniture(st, obs, host, f"{o} is inside {host}, which is closed")
        if action is None:
            st.abandoned.add(o)
        return action
    target = g.nodes[o].pose
    bad = st.bad_navs.setdefault(o, set())
    bad |= _blocked(st, host)
    here = (o, round(me.base_pose.x, 3), round(me.base_pose.y, 3))
    at_idx = _at_nav_of(g, host, me.base_pose)
    moved = isinstance(obs.memory.last_action(), Move) if obs.memory is not None else False
    best = _nearest_nav(g, host, target, bad)
    if (moved or (at_idx is not None and at_idx == best)) and here not in st.pick_attempts:
        st.pick_attempts.add(here)
        return _act(st, Pick(o), f"I am next to {host}; trying to grasp {o}.")
    if at_idx is not None and at_idx == best:
        bad.add(at_idx)
        best = _nearest_nav(g, host, target, bad)
    if best is None:
        st.abandoned.add(o)
        return None
    return _act(st, Navigate(host, best), f"Heading to {host} nav target {best}, the closest one to {o}.")


def _explore_furniture(st: OracleState, obs: Observation, fid: str, why: str) -> Optional[Action]:
    g, me = obs.scene_graph, obs.robot
    node = g.nodes[fid]
    if node.open_state is False and _at_nav_of(g, fid, me.base_pose) is not None:
        return _act(st, Open(fid), f"{why}; opening {fid} to look inside.")
    idx = _nearest_nav(g, fid, me.base_pose, _blocked(st, fid))
    if idx is None:
        return None
    return _act(st, Navigate(fid, idx), f"{why}; going to {fid}.")


def _alice_step(st: OracleState, obs: Observation) -> Action:
    _alice_ingest(st, obs)
    g, me, task = obs.scene_graph, obs.robot, st.task
    table = _work_table(g, task)
    order = task.object_order
    wanted = [o for o in order if o in st.explore_wanted or o in st.transport_wanted]
    pending = [
        o for o in wanted
        if o not in st.delivered and o not in st.abandoned and not _placed(g, task, o)
    ]

    if me.gripper is not None:
        drop_zone = g.nodes[task.destination(me.gripper)].pose
        handoff = _nearest_nav(g, table, drop_zone)
        if _at(me.base_pose, g.nodes[table].nav_targets[handoff]):
            return _act(st, Place(me.gripper, table), f"At the hand-off point; leaving {me.gripper} for bob.")
        return _act(st, Navigate(table, handoff), f"Carrying {me.gripper} to bob's side of {table}.")

    last = obs.last_feedback
    if isinstance(last, fb.PickFailed) and last.reason == fb.TOO_FAR and last.dx is not None and last.object in pending:
        step = clip_move(obs.grid, me.base_pose, last.dx, last.dy)
        if step is not None:
            return _act(st, Move(*step), f"{last.object} is {last.distance:.2f} m away; shifting my base toward it.")
        idx = _at_nav_of(g, g.host_furniture(last.object) or table, me.base_pose)
        if idx is not None:
            st.bad_navs.setdefault(last.object, set()).add(idx)

    if st.explore_wanted and not st.delegated and "david" in obs.roster:
        st.delegated = True
        surfaces = tuple(sorted(
            fid for fid, n in g.nodes.items()
            if n.kind == "furniture" and n.open_state is None and fid != table
        ))
        return _send(st, "david", DelegatedExplore(surfaces), "Delegating the open surfaces to david while I check containers.")

    def known(o: str) -> bool:
        rel = g.relations.get(o)
        return rel is not None and rel.relation != "held"

    for o in pending:
        if known(o) and g.nodes[g.host_furniture(o)].open_state is not False:
            if me.base_pose.distance_to(g.nodes[o].pose) <= me.reach_radius:
                here = (o, round(me.base_pose.x, 3), round(me.base_pose.y, 3))
                if here not in st.pick_attempts:
                    st.pick_attempts.add(here)
                    return _act(st, Pick(o), f"{o} is within my reach right now.")

    known_jobs = [o for o in pending if known(o)]
    missing = [o for o in pending if not known(o)]
    explore_targets = _explore_targets(st, obs, table) if missing else []

    if isinstance(task, MakeSandwich) and pending and not known(pending[0]) and explore_targets:
        jobs: list[str] = []
    else:
        jobs = known_jobs
    for o in jobs:
        action = _alice_job(st, obs, o)
        if action is not None:
            return action

    if any(o in st.transport_wanted and o not in st.explore_wanted for o in missing) and table not in st.visited:
        idx = _nearest_nav(g, table, me.base_pose)
        return _act(st, Navigate(table, idx), f"Looking over {table} for the objects bob asked me to move.")
    if explore_targets:
        fid = explore_targets[0]
        return _explore_furniture(st, obs, fid, f"Still looking for {', '.join(missing)}")
    for o in known_jobs:
        action = _alice_job(st, obs, o)
        if action is not None:
            return action
    return _act(st, Wait(), "No pending requests I can act on.")


def _explore_targets(st: OracleState, obs: Observation, table: str) -> list[str]:
    g, me = obs.scene_graph, obs.robot
    closed = [fid for fid, n in g.nodes.items() if n.kind == "furniture" and n.open_state is False]
    targets = closed
    if "david" not in obs.roster or not closed:
        if "david" not in obs.roster:
            surfaces = [
                fid for fid, n in g.nodes.items()
                if n.kind == "furniture" and n.open_state is None and fid != table and fid not in st.visited
            ]
            targets = closed + surfaces

    def distance(fid: str) -> float:
        blocked = _blocked(st, fid)
        return min(nav.distance_to(me.base_pose) for i, nav in enumerate(g.nodes[fid].nav_targets) if i not in blocked)

    reachable = [fid for fid in targets if len(_blocked(st, fid)) < len(g.nodes[fid].nav_targets)]
    return sorted(reachable, key=lambda fid: (distance(fid), fid))


# -- mobile robot ------------------------------------------------------------------------------


def _david_step(st: OracleState, obs: Observation) -> Action:
    g, me, task = obs.scene_graph, obs.robot, st.task
    for msg in obs.new_messages:
        if isinstance(msg.payload, DelegatedExplore):
            st.queue.extend(f for f in msg.payload.furniture_ids if f not in st.queue)
    _note_navigation(st, obs)

    table = _work_table(g, task)
    if "alice" in obs.roster:
        for o in task.object_order:
            rel = g.relations.get(o)
            host = g.host_furniture(o)
            if rel is None or host is None or host == table or o in st.reported:
                continue
            st.reported.add(o)
            return _send(st, "alice", LocationReport(o, g.nodes[o].pose, host), f"Found {o} at {host}; telling alice.")

    while st.queue and (
        st.queue[0] in st.visited
        or st.queue[0] not in g.nodes
        or _nearest_nav(g, st.queue[0], me.base_pose, _blocked(st, st.queue[0])) is None
    ):
        st.queue.pop(0)
    if st.queue:
        fid = st.queue[0]
        idx = _nearest_nav(g, fid, me.base_pose, _blocked(st, fid))
        return _act(st, Navigate(fid, idx), f"Exploring {fid} as alice asked.")
    return _act(st, Wait(), "No exploration left for me.")


_STEPS = {"manipulation": _bob_step, "mobile_manipulation": _alice_step, "mobile": _david_step}


def oracle_policy_step(state: OracleState, observation: Observation) -> Action:
    return _STEPS[observation.robot.role](state, observation)


class OraclePolicy:
    """Deterministic scripted policy for one robot; ignores the prompt text."""

    def __init__(self, robot_id: str, task) -> None:
        self.state = OracleState(robot_id, task)

    def decide(self, bundle: Optional[PromptBundle], observation: Observation) -> PolicyDecision:
        action = oracle_policy_step(self.state, observation)
        return PolicyDecision(self.state.thought, action, f"{self.state.thought}\n```action\n{format_action(action)}\n```")
