"""Append-only per-robot histories of actions, feedback and received messages."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Optional

from collabsim.comms import Message, render_message
from collabsim.feedback import FEEDBACK_TYPES, render_feedback
from collabsim.world.actions import ACTION_TYPES, format_action

LATEST_TAG = "[LATEST]"


class NonMonotoneStep(ValueError):
    pass


@dataclass
class MemoryBuffer:
    capacity: Optional[int] = None
    feedback_log: deque = field(default_factory=deque)
    message_log: deque = field(default_factory=deque)
    action_log: deque = field(default_factory=deque)

    def __post_init__(self) -> None:
        if self.capacity is not None and self.capacity < 1:
            raise ValueError("capacity must be positive")
        for name in ("feedback_log", "message_log", "action_log"):
            setattr(self, name, deque(getattr(self, name), maxlen=self.capacity))

    def _log_for(self, item: Any) -> deque:
        if isinstance(item, Message):
            return self.message_log
        if isinstance(item, FEEDBACK_TYPES):
            return self.feedback_log
        if isinstance(item, ACTION_TYPES):
            return self.action_log
        raise TypeError(f"cannot store {type(item).__name__} in memory")

    def append(self, step: int, item: Any) -> None:
        log = self._log_for(item)
        if log and step < log[-1][0]:
            raise NonMonotoneStep(f"step {step} after step {log[-1][0]}")
        log.append((step, item))

    def last_feedback(self):
        return self.feedback_log[-1][1] if self.feedback_log else None

    def last_action(self):
        return self.action_log[-1][1] if self.action_log else None

    def __len__(self) -> int:
        return len(self.feedback_log) + len(self.message_log) + len(self.action_log)


def _section(title: str, lines: list[str]) -> str:
    body = "\n".join(f"  {line}" for line in lines) if lines else "  (none)"
    return f"{title}:\n{body}"


def render_memory(buffer: MemoryBuffer, *, latest_only: bool = False, include_feedback: bool = True) -> str:
    """Three chronological sections; the newest feedback and message carry the latest tag.

    ``latest_only`` keeps just the tagged entries (history ablation) and
    ``include_feedback=False`` drops the feedback section (feedback ablation).
    """
    actions = [] if latest_only else [f"[step {s}] {format_action(a)}" for s, a in buffer.action_log]

    def tagged(log: deque, render) -> list[str]:
        rows = [f"[step {s}] {render(item)}" for s, item in log]
        if rows:
            rows[-1] = f"{LATEST_TAG} {rows[-1]}"
        return rows[-1:] if latest_only else rows

    sections = [_section("Action history", actions)]
    if include_feedback:
        sections.append(_section("Feedback history", tagged(buffer.feedback_log, render_feedback)))
    sections.append(_section("Received message history", tagged(buffer.message_log, render_message)))
    return "\n".join(sections)
