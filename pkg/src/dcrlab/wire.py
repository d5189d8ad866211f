"""In-process duplex channel with a line-oriented wire format.

Messages are (phase, index, payload-bytes).  On any byte-stream transport
a message is one line, fields comma-separated: ``phase,index,payload_hex``.
The default transport is an in-memory queue pair; transcript logs use the
same line format, prefixed with the direction, and can be replayed.
"""

from collections import deque
from dataclasses import dataclass
from pathlib import Path


class WireError(ValueError):
    """Malformed frame on the wire."""


@dataclass(frozen=True)
class Message:
    phase: str
    index: int
    payload: bytes

    def encode(self) -> str:
        if "," in self.phase or "\n" in self.phase:
            raise WireError("phase names must not contain commas or newlines")
        return f"{self.phase},{self.index},{self.payload.hex()}"

    @classmethod
    def decode(cls, line: str) -> "Message":
        parts = line.strip().split(",")
        if len(parts) != 3:
            raise WireError(f"expected 3 fields, got {len(parts)}: {line!r}")
        phase, index, payload_hex = parts
        try:
            return cls(phase=phase, index=int(index), payload=bytes.fromhex(payload_hex))
        except ValueError as exc:
            raise WireError(f"bad frame {line!r}") from exc


class InMemoryTransport:
    """Two one-directional line queues; side 0 and side 1."""

    def __init__(self):
        self._queues = (deque(), deque())

    def send_line(self, side: int, line: str) -> None:
        self._queues[1 - side].append(line)

    def recv_line(self, side: int) -> str:
        queue = self._queues[side]
        if not queue:
            raise WireError("receive on empty channel")
        return queue.popleft()


class Endpoint:
    """One end of a duplex channel; logs everything it sends or receives."""

    def __init__(self, transport, side: int, log: "TranscriptLog | None" = None):
        self.transport = transport
        self.side = side
        self.log = log

    def send(self, msg: Message) -> None:
        if self.log is not None:
            self.log.record("send" if self.side == 0 else "recv", msg)
        self.transport.send_line(self.side, msg.encode())

    def recv(self) -> Message:
        msg = Message.decode(self.transport.recv_line(self.side))
        return msg


def duplex_pair(log: "TranscriptLog | None" = None) -> tuple[Endpoint, Endpoint]:
    transport = InMemoryTransport()
    return Endpoint(transport, 0, log), Endpoint(transport, 1, log)


class TranscriptLog:
    """Ordered record of framed messages; dump/replay round-trips a file.

    The convention is that direction ``send`` marks side-0 (sender-role)
    frames and ``recv`` marks side-1 frames, so a replayed log fully
    determines who said what.
    """

    def __init__(self):
        self.entries: list[tuple[str, Message]] = []

    def record(self, direction: str, msg: Message) -> None:
        self.entries.append((direction, msg))

    def dump(self, path) -> None:
        lines = [f"{direction},{msg.encode()}" for direction, msg in self.entries]
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))

    @classmethod
    def replay(cls, path) -> "TranscriptLog":
        log = cls()
        for line in Path(path).read_text().splitlines():
            if not line.strip():
                continue
            direction, rest = line.split(",", 1)
            if direction not in ("send", "recv"):
                raise WireError(f"unknown direction {direction!r}")
            log.record(direction, Message.decode(rest))
        return log

    def messages(self) -> list[Message]:
        return [msg for _, msg in self.entries]
