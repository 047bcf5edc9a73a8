"""Decentralized episode loop: each robot drains, observes, decides and acts in turn."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

from collabsim import ROBOT_ORDER
from collabsim.codec import decode, encode
from collabsim.comms import MessageBus, render_message
from collabsim.feedback import render_feedback
from collabsim.harness.logs import LOG_VERSION, write_log
from collabsim.memory import MemoryBuffer
from collabsim.policy.base import ChatBackendConfig, Observation, Policy, PolicyConfig, PolicyDecision
from collabsim.policy.chat import ChatPolicy
from collabsim.policy.oracle import OraclePolicy
from collabsim.policy.prompts import serialize_observation
from collabsim.scenegraph import SceneGraph, update_from_feedback, update_from_message, update_from_observation
from collabsim.tasks import evaluate, task_kind
from collabsim.world.actions import SendMessage, Wait, format_action
from collabsim.world.execute import execute, observe
from collabsim.world.scenario import Scenario, load_scenario
from collabsim.world.state import ScenarioInvalid

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpisodeConfig:
    scenario_path: str
    task: Any = None  # overrides the scenario's own task when set
    horizon: int = 50
    seed: int = 0
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    ablation_no_mobile_robot: bool = False
    verbose: bool = False

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")

    def to_dict(self) -> dict[str, Any]:
        pol = self.policy
        return {
            "scenario_path": str(self.scenario_path),
            "task": encode(self.task) if self.task is not None else None,
            "horizon": self.horizon,
            "seed": self.seed,
            "policy": {
                "backend": pol.backend,
                "chat": dataclasses.asdict(pol.chat) if pol.chat is not None else None,
                "no_feedback": pol.no_feedback,
                "no_history": pol.no_history,
            },
            "ablation_no_mobile_robot": self.ablation_no_mobile_robot,
            "verbose": self.verbose,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> EpisodeConfig:
        pol = data.get("policy", {})
        chat = pol.get("chat")
        return cls(
            scenario_path=data["scenario_path"],
            task=decode(data["task"]) if data.get("task") is not None else None,
            horizon=data.get("horizon", 50),
            seed=data.get("seed", 0),
            policy=PolicyConfig(
                backend=pol.get("backend", "oracle"),
                chat=ChatBackendConfig(**chat) if chat else None,
                no_feedback=pol.get("no_feedback", False),
                no_history=pol.get("no_history", False),
            ),
            ablation_no_mobile_robot=data.get("ablation_no_mobile_robot", False),
            verbose=data.get("verbose", False),
        )


@dataclass
class EpisodeResult:
    success: bool
    partial_success: float
    temporal_steps: int
    action_steps: int
    parse_failures: int = 0
    log_path: Optional[str] = None
    scenario_name: str = ""
    task_kind: str = ""

    def metrics(self) -> dict[str, Any]:
        return {
            "success": self.success,
            "partial_success": self.partial_success,
            "temporal_steps": self.temporal_steps,
            "action_steps": self.action_steps,
            "parse_failures": self.parse_failures,
        }


@dataclass
class Episode:
    """Result plus the full record stream (what the log file holds)."""

    result: EpisodeResult
    records: list[dict[str, Any]]


def _graph_objects(graph: SceneGraph) -> dict[str, list[str]]:
    return {oid: [rel.relation, rel.parent] for oid, rel in sorted(graph.relations.items())}


def build_policies(config: EpisodeConfig, scenario: Scenario, roster: tuple[str, ...], task) -> dict[str, Policy]:
    out: dict[str, Policy] = {}
    for rid in roster:
        if config.policy.backend == "oracle":
            out[rid] = OraclePolicy(rid, task)
        else:
            out[rid] = ChatPolicy(rid, scenario.state.robots[rid].role, config.policy.chat, seed=config.seed)
    return out


def run_episode(
    config: EpisodeConfig,
    policies: Optional[Mapping[str, Policy]] = None,
    log_path: str | Path | None = None,
) -> Episode:
    """Run one episode; optionally write its log to ``log_path``."""
    scenario = load_scenario(config.scenario_path)
    task = config.task if config.task is not None else scenario.task
    if task is None:
        raise ScenarioInvalid(f"{config.scenario_path}: no task given")
    state = scenario.state.copy()
    if config.ablation_no_mobile_robot:
        state.robots = {rid: r for rid, r in state.robots.items() if r.role != "mobile"}
    roster = tuple(rid for rid in ROBOT_ORDER if rid in state.robots)
    if policies is None:
        policies = build_policies(config, scenario, roster, task)
    bus = MessageBus(roster)
    graphs = {rid: SceneGraph.initial(state, rid) for rid in roster}
    memories = {rid: MemoryBuffer() for rid in roster}
    no_feedback, no_history = config.policy.no_feedback, config.policy.no_history

    records: list[dict[str, Any]] = [{
        "kind": "header",
        "version": LOG_VERSION,
        "scenario": scenario.name,
        "scenario_hash": scenario.content_hash,
        "task_kind": task_kind(task),
        "roster": list(roster),
        "config": config.to_dict(),
    }, {"kind": "state", "step": -1, "robot": None, "state_hash": state.state_hash()}]

    action_steps = parse_failures = 0
    temporal_steps = config.horizon
    for t in range(config.horizon):
        state.step = t
        all_wait = True
        for rid in roster:
            inbox = bus.drain(rid)
            graph = graphs[rid]
            for msg in inbox:
                graph = update_from_message(graph, msg)
                memories[rid].append(t, msg)
            graph = update_from_observation(graph, observe(state, rid), t)
            robot = dataclasses.replace(state.robots[rid])
            bundle = serialize_observation(
                robot, graph, inbox, memories[rid], task,
                step=t, no_feedback=no_feedback, no_history=no_history,
            )
            obs = Observation(
                rid, t, robot, graph, inbox, memories[rid], task, state.grid, roster,
                last_feedback=None if no_feedback else memories[rid].last_feedback(),
            )
            try:
                decision = policies[rid].decide(bundle, obs)
            except Exception as exc:  # a policy must never abort the episode
                log.exception("%s: policy raised at step %d", rid, t)
                decision = PolicyDecision("", Wait(), "", 0, False, f"{type(exc).__name__}: {exc}")
            action = decision.action
            parse_failures += int(decision.parse_failure)
            if config.verbose:
                records.append({"kind": "prompt", "step": t, "robot": rid,
                                "system": bundle.system_text, "user": bundle.user_text})
                if decision.transcript:
                    records.append({"kind": "transcript", "step": t, "robot": rid, "exchanges": decision.transcript})
            records.append({
                "kind": "decision", "step": t, "robot": rid,
                "thought": decision.thought, "action": encode(action), "text": format_action(action),
                "raw_output": decision.raw_output, "retries": decision.retries,
                "parse_failure": decision.parse_failure, "error": decision.error,
            })
            sent_before = bus.sent_count
            state, feedback = execute(state, rid, action, task=task, known=graph.known_ids(), bus=bus)
            if isinstance(action, SendMessage) and bus.sent_count > sent_before:
                msg = bus.pending[action.recipient][-1]
                records.append({"kind": "message", "step": t, "robot": rid,
                                "message": encode(msg), "text": render_message(msg)})
            graph = update_from_feedback(graph, feedback, t)
            graphs[rid] = graph
            memories[rid].append(t, action)
            memories[rid].append(t, feedback)
            records.append({"kind": "feedback", "step": t, "robot": rid,
                            "feedback": encode(feedback), "text": render_feedback(feedback)})
            records.append({"kind": "state", "step": t, "robot": rid, "state_hash": state.state_hash()})
            records.append({"kind": "graph", "step": t, "robot": rid, "objects": _graph_objects(graph)})
            if not isinstance(action, Wait):
                action_steps += 1
                all_wait = False
        if all_wait and evaluate(state, task).success:
            temporal_steps = t + 1
            break

    report = evaluate(state, task)
    result = EpisodeResult(
        success=report.success,
        partial_success=report.partial_success,
        temporal_steps=temporal_steps,
        action_steps=action_steps,
        parse_failures=parse_failures,
        log_path=str(log_path) if log_path is not None else None,
        scenario_name=scenario.name,
        task_kind=task_kind(task),
    )
    records.append({"kind": "result", **result.metrics()})
    if log_path is not None:
        write_log(log_path, records)
    return Episode(result, records)
