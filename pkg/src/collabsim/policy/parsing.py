"""Extract one executable action from free-form model output.

The model thinks in prose and then emits a fenced block::

    ```action
    pick(apple)
    ```

Only the last action block counts.  A ``send`` may carry its payload inline
(``send(alice, explore_request: apple, fork)``) or in a separate fenced
``message`` block holding a tagged JSON record, which takes precedence.
"""

from __future__ import annotations

import json
import re

from collabsim import ROBOT_ORDER
from collabsim.codec import decode
from collabsim.comms import MessagePayload, parse_payload
from collabsim.world.actions import (
    LEGAL_ACTIONS,
    Action,
    Move,
    Navigate,
    Open,
    Pick,
    Place,
    SendMessage,
    Wait,
)

_FENCE = re.compile(r"```[ \t]*([A-Za-z_]*)[ \t]*\n(.*?)```", re.DOTALL)
_CALL = re.compile(r"^([A-Za-z_]+)\s*\((.*)\)\s*;?\s*$", re.DOTALL)
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")


class ParseFailure(ValueError):
    def __init__(self, reason: str, detail: str = "") -> None:
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail


def split_thought(raw: str) -> tuple[str, str | None]:
    """Return (text before the last action block, block body or None)."""
    blocks = [(m.start(), m.group(1).lower(), m.group(2)) for m in _FENCE.finditer(raw)]
    actions = [b for b in blocks if b[1] in ("action", "")]
    if not actions:
        return raw.strip(), None
    start, _, body = actions[-1]
    return raw[:start].strip(), body


def _message_block(raw: str) -> MessagePayload | None:
    bodies = [m.group(2) for m in _FENCE.finditer(raw) if m.group(1).lower() == "message"]
    if not bodies:
        return None
    try:
        payload = decode(json.loads(bodies[-1]))
    except (ValueError, TypeError):
        return None
    return payload if type(payload).__name__ in _PAYLOAD_NAMES else None


_PAYLOAD_NAMES = {"ExploreRequest", "TransportRequest", "DelegatedExplore", "LocationReport", "TaskStatusShare", "FreeText"}


def _name(text: str, what: str) -> str:
    text = text.strip().strip("'\"")
    if not _NAME.match(text):
        raise ParseFailure("BadArguments", f"invalid {what} {text!r}")
    return text


def _args(body: str) -> list[str]:
    body = body.strip()
    return [a.strip() for a in body.split(",")] if body else []


def parse_call(line: str, raw: str = "") -> Action:
    m = _CALL.match(line.strip())
    if not m:
        raise ParseFailure("Malformed", line.strip()[:80])
    verb, body = m.group(1).lower(), m.group(2)
    if verb == "send":
        recipient, sep, text = body.partition(",")
        if not sep or not text.strip():
            raise ParseFailure("BadArguments", "send needs a recipient and a payload")
        recipient = _name(recipient, "recipient")
        if recipient not in ROBOT_ORDER:
            raise ParseFailure("UnknownRecipient", recipient)
        payload = _message_block(raw) or parse_payload(text.strip().strip("'\""))
        return SendMessage(recipient, payload)
    args = _args(body)
    try:
        if verb == "navigate" and len(args) in (1, 2):
            return Navigate(_name(args[0], "furniture"), int(args[1]) if len(args) == 2 else 0)
        if verb == "move" and len(args) == 2:
            return Move(float(args[0]), float(args[1]))
        if verb == "open" and len(args) == 1:
            return Open(_name(args[0], "furniture"))
        if verb == "pick" and len(args) == 1:
            return Pick(_name(args[0], "object"))
        if verb == "place" and len(args) == 2:
            return Place(_name(args[0], "object"), _name(args[1], "destination"))
        if verb == "wait" and not args:
            return Wait()
    except ValueError as exc:
        if isinstance(exc, ParseFailure):
            raise
        raise ParseFailure("BadArguments", str(exc)) from exc
    if verb in ("navigate", "move", "open", "pick", "place", "wait"):
        raise ParseFailure("BadArguments", f"{verb} takes different arguments")
    raise ParseFailure("UnknownAction", verb)


def parse_action(raw_output: str, role: str) -> Action:
    """Parse the last fenced action block; raise ParseFailure when absent, malformed or role-illegal."""
    _, body = split_thought(raw_output or "")
    if body is None:
        raise ParseFailure("NoActionBlock")
    lines = [ln for ln in body.strip().splitlines() if ln.strip()]
    if len(lines) != 1 and not (lines and lines[0].lower().startswith("send")):
        raise ParseFailure("Malformed", "the action block must hold exactly one action")
    action = parse_call(" ".join(lines), raw_output)
    if not isinstance(action, LEGAL_ACTIONS[role]):
        raise ParseFailure("RoleIllegal", f"a {role} robot cannot {type(action).__name__.lower()}")
    return action
