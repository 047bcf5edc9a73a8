from __future__ import annotations

import pytest

from collabsim.comms import FreeText, Message
from collabsim.feedback import MoveSuccess, PickSuccess, WaitAck
from collabsim.memory import LATEST_TAG, MemoryBuffer, NonMonotoneStep, render_memory
from collabsim.world.actions import Pick, Wait


def test_empty_render():
    text = render_memory(MemoryBuffer())
    assert text == (
        "Action history:\n  (none)\n"
        "Feedback history:\n  (none)\n"
        "Received message history:\n  (none)"
    )


def test_append_and_monotone():
    buf = MemoryBuffer()
    buf.append(5, WaitAck())
    assert len(buf) == 1
    with pytest.raises(NonMonotoneStep):
        buf.append(2, WaitAck())
    buf.append(1, Wait())  # other logs keep their own order


def test_capacity_evicts_oldest():
    buf = MemoryBuffer(capacity=3)
    for s in range(4):
        buf.append(s, MoveSuccess(float(s), 0.0))
    assert [s for s, _ in buf.feedback_log] == [1, 2, 3]


def test_rejects_unknown_items():
    with pytest.raises(TypeError):
        MemoryBuffer().append(0, "text")


def _filled() -> MemoryBuffer:
    buf = MemoryBuffer()
    buf.append(0, Pick("cup"))
    buf.append(0, PickSuccess("cup"))
    buf.append(1, Wait())
    buf.append(1, WaitAck())
    buf.append(1, Message("bob", "alice", 0, FreeText("first")))
    buf.append(2, Message("david", "alice", 1, FreeText("second")))
    return buf


def test_one_latest_tag_per_section():
    text = render_memory(_filled())
    actions, rest = text.split("Feedback history:")
    feedback, messages = rest.split("Received message history:")
    assert LATEST_TAG not in actions
    assert feedback.count(LATEST_TAG) == 1 and messages.count(LATEST_TAG) == 1
    assert f"{LATEST_TAG} [step 1] Wait acknowledged" in feedback
    assert f"{LATEST_TAG} [step 2] From david" in messages


def test_render_is_deterministic():
    buf = _filled()
    assert render_memory(buf) == render_memory(buf)


def test_latest_only_keeps_tagged_entries():
    text = render_memory(_filled(), latest_only=True)
    entries = [ln.strip() for ln in text.splitlines() if ln.startswith("  ") and "(none)" not in ln]
    assert entries and all(e.startswith(LATEST_TAG) for e in entries)
    assert "pick(cup)" not in text


def test_feedback_can_be_dropped():
    text = render_memory(_filled(), include_feedback=False)
    assert "Feedback history" not in text
    assert "Wait acknowledged" not in text


def test_prefix_consistency():
    full = _filled()
    prefix = MemoryBuffer()
    prefix.append(0, Pick("cup"))
    prefix.append(0, PickSuccess("cup"))
    strip = lambda t: [ln.replace(f"{LATEST_TAG} ", "") for ln in t.splitlines() if ln.startswith("  [")]
    short, long = strip(render_memory(prefix)), strip(render_memory(full))
    assert all(line in long for line in short)
