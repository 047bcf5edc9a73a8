"""Atomic robot actions and the per-role legality filter."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

from collabsim.codec import register

if TYPE_CHECKING:
    from collabsim.comms import MessagePayload


@register("navigate")
@dataclass(frozen=True)
class Navigate:
    furniture: str
    index: int = 0


@register("move")
@dataclass(frozen=True)
class Move:
    dx: float
    dy: float


@register("open")
@dataclass(frozen=True)
class Open:
    furniture: str


@register("pick")
@dataclass(frozen=True)
class Pick:
    object: str


@register("place")
@dataclass(frozen=True)
class Place:
    object: str
    destination: str


@register("wait")
@dataclass(frozen=True)
class Wait:
    pass


@register("send")
@dataclass(frozen=True)
class SendMessage:
    recipient: str
    payload: MessagePayload


Action = Union[Navigate, Move, Open, Pick, Place, Wait, SendMessage]

ACTION_TYPES: tuple[type, ...] = (Navigate, Move, Open, Pick, Place, Wait, SendMessage)

LEGAL_ACTIONS: dict[str, tuple[type, ...]] = {
    "mobile": (Navigate, Move, Wait, SendMessage),
    "manipulation": (Pick, Place, Wait, SendMessage),
    "mobile_manipulation": ACTION_TYPES,
}


def is_legal(role: str, action: Action) -> bool:
    return isinstance(action, LEGAL_ACTIONS[role])


def format_action(action: Action) -> str:
    """Render an action in the same grammar the action parser accepts."""
    if isinstance(action, Navigate):
        return f"navigate({action.furniture}, {action.index})"
    if isinstance(action, Move):
        return f"move({action.dx:.2f}, {action.dy:.2f})"
    if isinstance(action, Open):
        return f"open({action.furniture})"
    if isinstance(action, Pick):
        return f"pick({action.object})"
    if isinstance(action, Place):
        return f"place({action.object}, {action.destination})"
    if isinstance(action, SendMessage):
        from collabsim.comms import payload_syntax

        return f"send({action.recipient}, {payload_syntax(action.payload)})"
    return "wait()"
