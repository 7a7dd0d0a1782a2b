import json

import pytest
from hypothesis import given, strategies as st

from coedit.diffs import Delete, Insert
from coedit.service import ScriptedClient, ServiceCore, ServiceError
from coedit.wire import (
    ProtocolError,
    decode_msg,
    diffs_msg,
    doc_msg,
    encode_msg,
    err_msg,
    get_msg,
    join_msg,
    put_msg,
)
from scenarios import run_push_stress, run_schedule

diff_seqs = st.lists(
    st.one_of(
        st.builds(Insert, st.integers(0, 40), st.text(min_size=1, max_size=4)),
        st.builds(Delete, st.integers(0, 40), st.integers(1, 9)),
    ),
    max_size=4,
).map(tuple)


@given(
    st.one_of(
        st.builds(join_msg, st.text(min_size=1, max_size=8)),
        st.builds(put_msg, diff_seqs, st.integers(0, 100)),
        st.just(get_msg()),
        st.builds(doc_msg, st.text(max_size=20), st.integers(0, 100)),
        st.builds(diffs_msg, diff_seqs, st.integers(0, 100)),
        st.builds(err_msg, st.text(max_size=20)),
    )
)
def test_wire_round_trip(msg):
    assert decode_msg(encode_msg(msg)) == msg


def test_wire_field_names_are_exact():
    frame = json.loads(encode_msg(put_msg((Insert(1, "a"), Delete(0, 2)), 3)))
    assert frame == {
        "t": "put",
        "diffs": [
            {"op": "i", "pos": 1, "text": "a"},
            {"op": "d", "pos": 0, "len": 2},
        ],
        "seen": 3,
    }
    assert json.loads(encode_msg(doc_msg("hi", 0))) == {"t": "doc", "text": "hi", "serial": 0}


@pytest.mark.parametrize(
    "frame",
    [
        "not json",
        '"just a string"',
        '{"t": "nope"}',
        '{"t": "put", "diffs": [], "seen": "x"}',
        '{"t": "put", "diffs": [{"op": "i"}], "seen": 0}',
        '{"t": "join"}',
        '{"t": "doc", "text": 5, "serial": 0}',
    ],
)
def test_wire_rejects_bad_frames(frame):
    with pytest.raises(ProtocolError):
        decode_msg(frame)


def test_join_returns_doc_and_serial_zero():
    core = ServiceCore("hello", mode="pull")
    assert core.join("a") == [("a", doc_msg("hello", 0))]


def test_join_after_edits_returns_current_doc():
    core = ServiceCore("hello", mode="pull")
    core.join("a")
    core.put("a", (Insert(5, "!"),), 0)
    assert core.join("b") == [("b", doc_msg("hello!", 0))]


def test_duplicate_join_rejected():
    core = ServiceCore("", mode="pull")
    core.join("a")
    with pytest.raises(ServiceError):
        core.join("a")


def test_put_requires_join():
    with pytest.raises(ServiceError):
        ServiceCore("", mode="pull").put("ghost", (), 0)


def test_put_with_clean_ledger_is_plain_application():
    core = ServiceCore("abc", mode="pull")
    core.join("a")
    core.join("b")
    out = core.put("a", (Delete(0, 1),), 0)
    assert out == []  # pull mode: nothing is delivered unasked
    assert core.doc == "bc"
    assert core.ledger("b")[0].diffs == (Delete(0, 1),)


def test_put_seen_validation():
    core = ServiceCore("abc", mode="pull")
    core.join("a")
    with pytest.raises(ServiceError, match="exceeds"):
        core.put("a", (), 1)
    core.join("b")
    core.put("b", (Insert(0, "x"),), 0)
    core.put("a", (), 1)  # confirms batch 1
    with pytest.raises(ServiceError, match="stale"):
        core.put("a", (), 0)


def test_get_empty_ledger():
    core = ServiceCore("abc", mode="pull")
    core.join("a")
    assert core.get("a") == [("a", diffs_msg((), 0))]


def test_get_delivers_batches_in_serial_order_then_clears():
    core = ServiceCore("abcdef", mode="pull")
    for cid in ("a", "b"):
        core.join(cid)
    core.put("b", (Insert(0, "1"),), 0)
    core.put("b", (Delete(2, 1),), 0)
    [(_, msg)] = core.get("a")
    assert msg["serial"] == 2
    assert msg["diffs"] == (Insert(0, "1"), Delete(2, 1))
    [(_, again)] = core.get("a")
    assert again["diffs"] == () and again["serial"] == 2


def test_get_rejected_in_push_mode():
    core = ServiceCore("", mode="push")
    core.join("a")
    with pytest.raises(ServiceError, match="pull"):
        core.get("a")


def test_push_put_fans_out_and_replies():
    core = ServiceCore("abc", mode="push")
    for cid in ("a", "b", "c"):
        core.join(cid)
    out = core.put("a", (Insert(0, "x"),), 0)
    assert ("b", diffs_msg((Insert(0, "x"),), 1)) in out
    assert ("c", diffs_msg((Insert(0, "x"),), 1)) in out
    # The reply repeats the putter's current serial (0: no batches for it).
    assert ("a", diffs_msg((), 0)) in out


def test_inapplicable_put_leaves_state_untouched():
    core = ServiceCore("ab", mode="pull")
    core.join("a")
    core.join("b")
    before = (core.doc, core.ledger("b"))
    with pytest.raises(ServiceError, match="inapplicable"):
        core.put("a", (Delete(0, 9),), 0)
    assert (core.doc, core.ledger("b")) == before


def test_leave_forgets_client():
    core = ServiceCore("ab", mode="pull")
    core.join("a")
    core.join("b")
    core.leave("b")
    assert core.clients == ("a",)
    core.put("a", (Insert(0, "x"),), 0)  # no ledger for b to grow
    core.join("b")
    assert core.join.__name__  # rejoin allowed after leave
    assert core.doc == "xab"


def test_handle_dispatch_and_unknown_type():
    core = ServiceCore("", mode="pull")
    core.handle("a", join_msg("a"))
    with pytest.raises(ServiceError):
        core.handle("a", doc_msg("x", 0))
    with pytest.raises(ServiceError):
        core.handle("b", join_msg("mismatched"))


def test_crossed_delivery_is_skipped_and_reply_catches_up():
    # B's batch crosses A's in-flight put; A skips the stale frame and the
    # put reply re-delivers it rebased into A's frame.
    core = ServiceCore("0123456789", mode="push")
    a, b = ScriptedClient("a", "push"), ScriptedClient("b", "push")
    for client in (a, b):
        for cid, msg in core.handle(client.cid, client.hello()):
            client.receive(msg)
    out_b = core.handle("b", b.edit(Delete(2, 3)))
    for cid, msg in out_b:
        if cid == "b":
            b.receive(msg)  # b's own reply
    crossing = [msg for cid, msg in out_b if cid == "a"]
    put_a = a.edit(Insert(4, "XY"))  # insert lands inside b's delete
    for msg in crossing:
        a.receive(msg)
    assert a.applied == 0 and a.known == 1  # skipped, not applied
    for cid, msg in core.handle("a", put_a):
        (a if cid == "a" else b).receive(msg)
    assert a.doc == b.doc == core.doc == "01XY56789"


def test_double_put_before_any_delivery():
    # Two puts in flight at once: only the second reply may be applied.
    core = ServiceCore("base", mode="push")
    a, b = ScriptedClient("a", "push"), ScriptedClient("b", "push")
    for client in (a, b):
        for cid, msg in core.handle(client.cid, client.hello()):
            client.receive(msg)
    core.handle("b", b.edit(Insert(0, "Q")))  # queued for a, not delivered yet
    put1 = a.edit(Insert(4, "1"))
    put2 = a.edit(Insert(5, "2"))
    frames_to_a = []
    frames_to_a += [m for cid, m in core.handle("a", put1) if cid == "a"]
    frames_to_a += [m for cid, m in core.handle("a", put2) if cid == "a"]
    # Deliver the crossed batch first (FIFO), then the two replies.
    a.receive(diffs_msg((Insert(0, "Q"),), 1))
    for msg in frames_to_a:
        a.receive(msg)
    assert a.in_flight == 0
    assert a.doc == core.doc


def test_scheduled_runs_converge_in_both_modes():
    for seed in range(8):
        push_doc, push_clients = run_schedule(seed, "push")
        pull_doc, pull_clients = run_schedule(seed, "pull")
        assert push_doc == pull_doc
        assert push_clients == pull_clients


def test_push_stress_random_interleavings():
    for seed in range(15):
        run_push_stress(seed)


def test_push_and_pull_document_history_matches_session_reference():
    # The core's put path is mode-independent and matches the plain session
    # server: same put stream, same document at every step.
    from coedit.session import new_server, server_join, server_put

    core = ServiceCore("abc", mode="pull")
    ref = new_server("abc")
    for cid in ("a", "b"):
        core.join(cid)
        ref, _ = server_join(ref, cid)
    for cid, diffs in (
        ("a", (Insert(0, "x"),)),
        ("b", (Delete(1, 2),)),
        ("a", (Insert(2, "yz"),)),
        ("b", (Delete(0, 1),)),
    ):
        core.put(cid, diffs, 0)
        ref = server_put(ref, cid, diffs)
        assert core.doc == ref.doc
