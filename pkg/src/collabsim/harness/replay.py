"""Re-execute a logged episode and check the engine still produces the same records."""

from __future__ import annotations

from collections import defaultdict, deque
from pathlib import Path
from typing import Any, Optional

from collabsim.codec import decode
from collabsim.harness.logs import REPLAYED_KINDS, DriftDetected, LogCorrupt, read_log, result_record
from collabsim.harness.runner import EpisodeConfig, EpisodeResult, run_episode
from collabsim.policy.base import Observation, PolicyDecision, PromptBundle
from collabsim.world.actions import Wait
from collabsim.world.scenario import content_hash


class ScriptedPolicy:
    """Plays back recorded decisions in order, then waits."""

    def __init__(self, decisions: list[PolicyDecision]) -> None:
        self._queue = deque(decisions)

    def decide(self, bundle: Optional[PromptBundle], observation: Observation) -> PolicyDecision:
        if self._queue:
            return self._queue.popleft()
        return PolicyDecision("", Wait())


def scripted_policies(records: list[dict[str, Any]]) -> dict[str, ScriptedPolicy]:
    transcripts = {(r["step"], r["robot"]): r["exchanges"] for r in records if r["kind"] == "transcript"}
    by_robot: dict[str, list[PolicyDecision]] = defaultdict(list)
    for rec in records:
        if rec["kind"] != "decision":
            continue
        try:
            action = decode(rec["action"])
        except (TypeError, ValueError) as exc:
            raise LogCorrupt(f"step {rec.get('step')}: undecodable action: {exc}") from exc
        by_robot[rec["robot"]].append(PolicyDecision(
            rec.get("thought", ""), action, rec.get("raw_output", ""), rec.get("retries", 0),
            rec.get("parse_failure", False), rec.get("error"),
            transcripts.get((rec["step"], rec["robot"]), []),
        ))
    roster = records[0].get("roster", [])
    return {rid: ScriptedPolicy(by_robot.get(rid, [])) for rid in roster}


def result_from_record(rec: dict[str, Any], header: dict[str, Any], log_path: str) -> EpisodeResult:
    return EpisodeResult(
        success=rec["success"],
        partial_success=rec["partial_success"],
        temporal_steps=rec["temporal_steps"],
        action_steps=rec["action_steps"],
        parse_failures=rec.get("parse_failures", 0),
        log_path=log_path,
        scenario_name=header.get("scenario", ""),
        task_kind=header.get("task_kind", ""),
    )


def load_result(log_path: str | Path) -> EpisodeResult:
    """Read the recorded outcome of a log without re-running it."""
    records = read_log(log_path)
    return result_from_record(result_record(records), records[0], str(log_path))


def replay(log_path: str | Path) -> EpisodeResult:
    records = read_log(log_path)
    header = records[0]
    config = EpisodeConfig.from_dict(header["config"])
    try:
        raw = Path(config.scenario_path).read_bytes()
    except OSError as exc:
        raise LogCorrupt(f"scenario {config.scenario_path} unreadable: {exc}") from exc
    if content_hash(raw) != header.get("scenario_hash"):
        raise LogCorrupt(f"scenario {config.scenario_path} does not match the logged content hash")
    logged_result = result_record(records)

    episode = run_episode(config, policies=scripted_policies(records))
    expected = [r for r in records if r["kind"] in REPLAYED_KINDS]
    got = [r for r in episode.records if r["kind"] in REPLAYED_KINDS]
    for want, have in zip(expected, got):
        if want != have:
            raise DriftDetected(want.get("step", have.get("step", -1)), want, have)
    if len(expected) != len(got):
        longer = expected if len(expected) > len(got) else got
        extra = longer[min(len(expected), len(got))]
        raise DriftDetected(extra.get("step", -1), expected[len(got):][:1], got[len(expected):][:1])
    return result_from_record(logged_result, header, str(log_path))
