from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from collabsim import ROBOT_ORDER
from collabsim.codec import decode, encode
from collabsim.comms import (
    DelegatedExplore,
    ExploreRequest,
    FreeText,
    LocationReport,
    Message,
    MessageBus,
    TaskStatusShare,
    TransportRequest,
    UnknownRecipient,
    drain_inbox,
    parse_payload,
    payload_syntax,
    render_message,
    send,
)
from collabsim.world.geometry import Pose2D


def _simulate(sends: dict[tuple[int, str], Message], steps: int) -> dict[str, list[tuple[int, Message]]]:
    """Run the fixed alice -> bob -> david turn order; each robot drains then sends."""
    bus = MessageBus()
    received: dict[str, list[tuple[int, Message]]] = {r: [] for r in ROBOT_ORDER}
    for t in range(steps):
        for rid in ROBOT_ORDER:
            received[rid].extend((t, m) for m in drain_inbox(bus, rid))
            if (t, rid) in sends:
                send(bus, sends[(t, rid)])
    return received


def test_later_robot_receives_same_step():
    msg = Message("bob", "david", 3, ExploreRequest(("apple",)))
    got = _simulate({(3, "bob"): msg}, 6)
    assert got["david"] == [(3, msg)]


def test_earlier_robot_receives_next_step():
    msg = Message("david", "alice", 5, LocationReport("apple", Pose2D(1.0, 2.0), "shelf"))
    got = _simulate({(5, "david"): msg}, 8)
    assert got["alice"] == [(6, msg)]


def test_unknown_recipient():
    bus = MessageBus()
    with pytest.raises(UnknownRecipient):
        bus.send(Message("bob", "carol", 0, FreeText("hi")))


def test_self_message_rejected():
    with pytest.raises(ValueError):
        Message("bob", "bob", 0, FreeText("hi"))


def test_drain_order_and_emptying():
    bus = MessageBus()
    assert bus.drain("bob") == []
    m_david = Message("david", "bob", 2, FreeText("d"))
    m_alice = Message("alice", "bob", 2, FreeText("a"))
    m_old = Message("david", "bob", 1, FreeText("old"))
    for m in (m_david, m_alice, m_old):
        bus.send(m)
    assert [m.payload.text for m in bus.drain("bob")] == ["old", "a", "d"]
    assert bus.drain("bob") == []


def test_protocol_deviation_is_flagged_and_delivered():
    bus = MessageBus()
    delivered = bus.send(Message("david", "alice", 0, ExploreRequest(("apple",))))
    assert delivered.protocol_warning
    assert bus.drain("alice") == [delivered]
    ok = bus.send(Message("bob", "alice", 0, ExploreRequest(("apple",))))
    assert not ok.protocol_warning


def test_render_template():
    msg = Message("bob", "alice", 4, TransportRequest("soap", ""))
    assert render_message(msg).startswith("From bob at step 4: ")


PAYLOADS = [
    ExploreRequest(("apple", "fork")),
    TransportRequest("soap", "on work_table at (2.75, 1.50)"),
    DelegatedExplore(("counter", "island")),
    LocationReport("apple", Pose2D(1.25, 2.5), "counter"),
    TaskStatusShare("tray contains: apple"),
    FreeText("hello there"),
]


@pytest.mark.parametrize("payload", PAYLOADS, ids=lambda p: type(p).__name__)
def test_payload_syntax_round_trip(payload):
    assert parse_payload(payload_syntax(payload)) == payload
    assert decode(encode(payload)) == payload


_names = st.lists(st.from_regex(r"[a-z][a-z_]{0,8}", fullmatch=True), min_size=1, max_size=4)


@given(_names)
def test_explore_request_syntax_round_trip(names):
    payload = ExploreRequest(tuple(names))
    assert parse_payload(payload_syntax(payload)) == payload


@given(st.lists(st.tuples(st.integers(0, 5), st.sampled_from(ROBOT_ORDER), st.sampled_from(ROBOT_ORDER)), max_size=20))
def test_no_loss_no_duplication(entries):
    bus = MessageBus()
    sent = []
    for i, (step, sender, recipient) in enumerate(entries):
        if sender == recipient:
            continue
        sent.append(bus.send(Message(sender, recipient, step, FreeText(str(i)))))
    drained = [m for rid in ROBOT_ORDER for m in bus.drain(rid)]
    assert sorted(m.payload.text for m in drained) == sorted(m.payload.text for m in sent)
    assert bus.sent_count == bus.drained_count == len(sent)
