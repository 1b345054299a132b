"""Chat log parsing, per-channel indexing and mention detection.

Input is JSONL, one message per line with the fields ``id``, ``channel``,
``seq``, ``author``, ``text`` and ``abusive``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

FIELDS = ("id", "channel", "seq", "author", "text", "abusive")


class LogParseError(ValueError):
    """A line of the log is not a valid message record."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


class LogIntegrityError(ValueError):
    """The log is well formed but violates channel invariants."""


@dataclass(frozen=True)
class Message:
    id: str
    channel: str
    seq: int
    author: str
    text: str
    abusive: bool = False

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "channel": self.channel,
            "seq": self.seq,
            "author": self.author,
            "text": self.text,
            "abusive": self.abusive,
        }


@dataclass(frozen=True)
class ChannelIndex:
    """All messages of one channel, ordered by ``seq``."""

    channel: str
    messages: tuple[Message, ...]
    roster: frozenset[str] = field(default=frozenset())

    def __post_init__(self):
        for i, m in enumerate(self.messages):
            if m.seq != i:
                raise LogIntegrityError(
                    f"channel {self.channel!r}: expected seq {i}, found {m.seq}")
            if m.channel != self.channel:
                raise LogIntegrityError(
                    f"message {m.id!r} belongs to channel {m.channel!r}, not {self.channel!r}")
        object.__setattr__(self, "roster", frozenset(m.author for m in self.messages))

    @classmethod
    def from_messages(cls, channel: str, messages: Iterable[Message]) -> "ChannelIndex":
        return cls(channel, tuple(sorted(messages, key=lambda m: m.seq)))

    def __len__(self) -> int:
        return len(self.messages)

    def __getitem__(self, seq: int) -> Message:
        if not 0 <= seq < len(self.messages):
            raise KeyError(f"channel {self.channel!r} has no message with seq {seq}")
        return self.messages[seq]


def _validate_record(obj, line_no: int) -> Message:
    if not isinstance(obj, dict):
        raise LogParseError(line_no, "record is not a JSON object")
    missing = [k for k in FIELDS if k not in obj]
    if missing:
        raise LogParseError(line_no, f"missing field(s) {', '.join(missing)}")
    extra = sorted(set(obj) - set(FIELDS))
    if extra:
        raise LogParseError(line_no, f"unexpected field(s) {', '.join(extra)}")
    for key in ("id", "channel", "author", "text"):
        if not isinstance(obj[key], str):
            raise LogParseError(line_no, f"field {key!r} must be a string")
    seq = obj["seq"]
    if isinstance(seq, bool) or not isinstance(seq, int) or seq < 0:
        raise LogParseError(line_no, "field 'seq' must be a non-negative integer")
    if not isinstance(obj["abusive"], bool):
        raise LogParseError(line_no, "field 'abusive' must be a boolean")
    author = obj["author"]
    if not author or any(c.isspace() for c in author):
        raise LogParseError(line_no, f"invalid author {author!r}")
    return Message(obj["id"], obj["channel"], seq, author, obj["text"], obj["abusive"])


def iter_messages(stream: IO) -> Iterator[Message]:
    """Yield validated messages from a JSONL stream (bytes or text)."""
    for line_no, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise LogParseError(line_no, f"invalid UTF-8: {exc}") from None
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise LogParseError(line_no, f"malformed JSON: {exc.msg}") from None
        yield _validate_record(obj, line_no)


def parse_log(stream: IO) -> dict[str, ChannelIndex]:
    """Parse a JSONL chat log into one :class:`ChannelIndex` per channel.

    Channels are returned in order of first appearance.  Raises
    :class:`LogParseError` on malformed lines and :class:`LogIntegrityError`
    on duplicate or missing ``seq`` values.
    """
    by_channel: dict[str, dict[int, Message]] = {}
    ids: set[str] = set()
    for msg in iter_messages(stream):
        if msg.id in ids:
            raise LogIntegrityError(f"duplicate message id {msg.id!r}")
        ids.add(msg.id)
        slot = by_channel.setdefault(msg.channel, {})
        if msg.seq in slot:
            raise LogIntegrityError(
                f"channel {msg.channel!r}: duplicate seq {msg.seq}")
        slot[msg.seq] = msg

    channels = {}
    for name, slot in by_channel.items():
        for expected in range(len(slot)):
            if expected not in slot:
                raise LogIntegrityError(
                    f"channel {name!r}: missing seq {expected}")
        channels[name] = ChannelIndex(name, tuple(slot[i] for i in range(len(slot))))
    return channels


def load_log(path) -> dict[str, ChannelIndex]:
    with open(path, "rb") as fh:
        return parse_log(fh)


def dump_log(channels: Iterable[ChannelIndex], stream: IO[str]) -> None:
    """Write channels back out as JSONL, channel by channel in seq order."""
    for ch in channels:
        for m in ch.messages:
            stream.write(json.dumps(m.to_record(), ensure_ascii=False) + "\n")


def _strip_token(token: str) -> str:
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def detect_mentions(text: str, roster: Iterable[str]) -> list[str]:
    """Return roster members named in ``text`` as standalone tokens.

    Tokens are whitespace-separated with leading/trailing punctuation removed
    (so ``@alice,`` matches ``alice``).  Matching is case-insensitive, the
    result keeps first-occurrence order without duplicates, and the roster's
    own spelling is returned.  Self-mentions are not filtered here.
    """
    lookup: dict[str, str] = {}
    for name in sorted(roster):
        # names ending in punctuation are matchable through their stripped form
        lookup.setdefault(_strip_token(name).casefold(), name)
    lookup.pop("", None)
    if not lookup:
        return []
    found: list[str] = []
    seen: set[str] = set()
    for token in text.split():
        name = lookup.get(_strip_token(token).casefold())
        if name is not None and name not in seen:
            seen.add(name)
            found.append(name)
    return found

