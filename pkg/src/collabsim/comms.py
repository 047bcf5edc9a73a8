"""Typed point-to-point messaging between robots.

Delivery follows the fixed intra-step turn order: a message sent during a step is
available the next time the recipient drains its inbox, which is later in the same
step when the recipient acts after the sender and at the next step otherwise.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Union

from collabsim import ROBOT_ORDER
from collabsim.codec import register
from collabsim.world.geometry import Pose2D

log = logging.getLogger(__name__)


@register("explore_request")
@dataclass(frozen=True)
class ExploreRequest:
    object_names: tuple[str, ...]


@register("transport_request")
@dataclass(frozen=True)
class TransportRequest:
    object_name: str
    context_text: str = ""


@register("delegated_explore")
@dataclass(frozen=True)
class DelegatedExplore:
    furniture_ids: tuple[str, ...]


@register("location_report")
@dataclass(frozen=True)
class LocationReport:
    object_name: str
    pose: Pose2D
    furniture_id: str


@register("task_status_share")
@dataclass(frozen=True)
class TaskStatusShare:
    text: str


@register("free_text")
@dataclass(frozen=True)
class FreeText:
    text: str


MessagePayload = Union[
    ExploreRequest, TransportRequest, DelegatedExplore, LocationReport, TaskStatusShare, FreeText
]

# Which senders the collaboration protocol expects for each payload type.
PROTOCOL_SENDERS: dict[type, tuple[str, ...]] = {
    ExploreRequest: ("bob",),
    TransportRequest: ("bob",),
    DelegatedExplore: ("alice",),
    LocationReport: ("david", "alice"),
}


@register("message")
@dataclass(frozen=True)
class Message:
    sender: str
    recipient: str
    sent_step: int
    payload: MessagePayload
    protocol_warning: bool = False

    def __post_init__(self) -> None:
        if self.sender == self.recipient:
            raise ValueError("a robot cannot message itself")


class UnknownRecipient(KeyError):
    pass


def protocol_ok(sender: str, payload: MessagePayload) -> bool:
    allowed = PROTOCOL_SENDERS.get(type(payload))
    return allowed is None or sender in allowed


def render_payload(payload: MessagePayload) -> str:
    if isinstance(payload, ExploreRequest):
        return "Please explore the environment to find: " + ", ".join(payload.object_names) + "."
    if isinstance(payload, TransportRequest):
        text = f"Please bring {payload.object_name} to the work table within my reach."
        return f"{text} ({payload.context_text})" if payload.context_text else text
    if isinstance(payload, DelegatedExplore):
        return "Please explore these furniture items and report task objects: " + ", ".join(payload.furniture_ids) + "."
    if isinstance(payload, LocationReport):
        p = payload.pose
        return f"{payload.object_name} is at ({p.x:.2f}, {p.y:.2f}) at {payload.furniture_id}."
    if isinstance(payload, TaskStatusShare):
        return f"Status update from a teammate: {payload.text}"
    return payload.text


def render_message(msg: Message) -> str:
    return f"From {msg.sender} at step {msg.sent_step}: {render_payload(msg.payload)}"


def payload_syntax(payload: MessagePayload) -> str:
    """Compact form used inside ``send(...)`` action text; parsed back by the action parser."""
    if isinstance(payload, ExploreRequest):
        return "explore_request: " + ", ".join(payload.object_names)
    if isinstance(payload, TransportRequest):
        return f"transport_request: {payload.object_name}; {payload.context_text}".rstrip("; ")
    if isinstance(payload, DelegatedExplore):
        return "delegated_explore: " + ", ".join(payload.furniture_ids)
    if isinstance(payload, LocationReport):
        p = payload.pose
        return f"location_report: {payload.object_name}; {payload.furniture_id}; {p.x:.2f}; {p.y:.2f}"
    if isinstance(payload, TaskStatusShare):
        return f"task_status: {payload.text}"
    return payload.text


def _split(text: str, sep: str) -> list[str]:
    return [part.strip() for part in text.split(sep) if part.strip()]


def parse_payload(text: str) -> MessagePayload:
    """Inverse of :func:`payload_syntax`; anything unrecognised becomes free text."""
    head, sep, rest = text.partition(":")
    tag = head.strip().lower()
    if not sep:
        return FreeText(text.strip())
    rest = rest.strip()
    try:
        if tag == "explore_request" and _split(rest, ","):
            return ExploreRequest(tuple(_split(rest, ",")))
        if tag == "transport_request" and rest:
            name, _, context = rest.partition(";")
            return TransportRequest(name.strip(), context.strip())
        if tag == "delegated_explore" and _split(rest, ","):
            return DelegatedExplore(tuple(_split(rest, ",")))
        if tag == "location_report":
            name, furniture, x, y = _split(rest, ";")
            return LocationReport(name, Pose2D(float(x), float(y)), furniture)
        if tag == "task_status":
            return TaskStatusShare(rest)
    except ValueError:
        pass
    return FreeText(text.strip())


@dataclass
class MessageBus:
    roster: tuple[str, ...] = ROBOT_ORDER
    pending: dict[str, list[Message]] = field(default_factory=dict)
    sent_count: int = 0
    drained_count: int = 0

    def __post_init__(self) -> None:
        for rid in self.roster:
            self.pending.setdefault(rid, [])

    def send(self, msg: Message) -> Message:
        if msg.recipient not in self.roster:
            raise UnknownRecipient(msg.recipient)
        if msg.sender not in self.roster:
            raise UnknownRecipient(msg.sender)
        if not protocol_ok(msg.sender, msg.payload) and not msg.protocol_warning:
            log.warning("protocol deviation: %s sent %s", msg.sender, type(msg.payload).__name__)
            msg = Message(msg.sender, msg.recipient, msg.sent_step, msg.payload, protocol_warning=True)
        self.pending[msg.recipient].append(msg)
        self.sent_count += 1
        return msg

    def drain(self, robot_id: str) -> list[Message]:
        order = {rid: i for i, rid in enumerate(ROBOT_ORDER)}
        inbox = self.pending.get(robot_id, [])
        out = sorted(inbox, key=lambda m: (m.sent_step, order[m.sender]))
        self.pending[robot_id] = []
        self.drained_count += len(out)
        return out


def drain_inbox(bus: MessageBus, robot_id: str) -> list[Message]:
    return bus.drain(robot_id)


def send(bus: MessageBus, msg: Message) -> Message:
    return bus.send(msg)


def sender_rank(robot_id: str) -> int:
    return ROBOT_ORDER.index(robot_id) if robot_id in ROBOT_ORDER else len(ROBOT_ORDER)


__all__ = [
    "DelegatedExplore",
    "ExploreRequest",
    "FreeText",
    "LocationReport",
    "Message",
    "MessageBus",
    "MessagePayload",
    "TaskStatusShare",
    "TransportRequest",
    "UnknownRecipient",
    "drain_inbox",
    "parse_payload",
    "payload_syntax",
    "render_message",
    "render_payload",
    "send",
]
