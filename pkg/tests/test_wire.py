"""Framing and transport for the protocol channel."""

import pytest

from dcrlab.wire import (
    InMemoryTransport,
    Message,
    TranscriptLog,
    WireError,
    duplex_pair,
)


def test_message_line_roundtrip():
    msg = Message("commit", 3, b"\x01\xff")
    line = msg.encode()
    assert line == "commit,3,01ff"
    assert Message.decode(line) == msg


def test_empty_payload():
    msg = Message("coin-toss", 0, b"")
    assert Message.decode(msg.encode()) == msg


def test_bad_frames_rejected():
    with pytest.raises(WireError):
        Message.decode("only-two,fields")
    with pytest.raises(WireError):
        Message.decode("phase,notanint,00")
    with pytest.raises(WireError):
        Message.decode("phase,1,zz")
    with pytest.raises(WireError):
        Message("a,b", 0, b"").encode()


def test_duplex_pair_delivery_order():
    a, b = duplex_pair()
    a.send(Message("p", 0, b"\x00"))
    a.send(Message("p", 1, b"\x01"))
    assert b.recv().index == 0
    assert b.recv().index == 1
    b.send(Message("q", 7, b""))
    assert a.recv().phase == "q"


def test_recv_on_empty_channel_raises():
    transport = InMemoryTransport()
    with pytest.raises(WireError):
        transport.recv_line(0)


def test_transcript_log_roundtrip(tmp_path):
    log = TranscriptLog()
    log.record("send", Message("x", 0, b"\xaa"))
    log.record("recv", Message("y", 1, b""))
    path = tmp_path / "t.log"
    log.dump(path)
    back = TranscriptLog.replay(path)
    assert back.entries == log.entries
