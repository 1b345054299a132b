"""Conversational network extraction around a targeted message.

A window of recent messages slides over the context one message at a time.
The last message in the window is the *current* message; every other
author in the window is a presumed recipient, ranked by how recently they
posted, with users named in the current message promoted to the top.  Each
recipient gets a score that decays with rank and list length, and that score
is added to the undirected edge between them and the current author.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .chatlog import ChannelIndex, Message, detect_mentions
from .graphcore import ConversationGraph


class SliceKind(enum.Enum):
    BEFORE = "before"
    AFTER = "after"
    FULL = "full"


@dataclass(frozen=True)
class ExtractionConfig:
    context_half_width: int = 100
    window_size: int = 10

    def __post_init__(self):
        if self.context_half_width < 1:
            raise ValueError("context_half_width must be >= 1")
        if self.window_size < 1:
            raise ValueError("window_size must be >= 1")


@dataclass(frozen=True)
class ContextSlice:
    kind: SliceKind
    messages: tuple[Message, ...]
    target_index: int

    @property
    def target(self) -> Message:
        return self.messages[self.target_index]


def slice_context(channel: ChannelIndex, target_seq: int, cfg: ExtractionConfig,
                  kind: SliceKind) -> ContextSlice:
    """Messages around ``target_seq``, silently truncated at channel edges."""
    channel[target_seq]  # raises KeyError for unknown seq
    lo = max(0, target_seq - cfg.context_half_width)
    hi = min(len(channel) - 1, target_seq + cfg.context_half_width)
    if kind is SliceKind.BEFORE:
        hi = target_seq
    elif kind is SliceKind.AFTER:
        lo = target_seq
    return ContextSlice(kind, channel.messages[lo:hi + 1], target_seq - lo)


def rank_score(rank: int, length: int) -> Fraction:
    """Score of the entry at 1-based ``rank`` in a neighbor list of ``length``.

    Linear decay ``2 (L - r + 1) / (L (L + 1))``: decreasing in both rank and
    length, and the scores of one list sum to exactly 1.
    """
    return Fraction(2 * (length - rank + 1), length * (length + 1))


def build_neighbor_list(window: Sequence[Message], current: Message,
                        mentions: Iterable[str] = ()) -> list[tuple[str, Fraction]]:
    """Scored presumed recipients of ``current``, best first.

    ``window`` ends with ``current``.  Base order is distinct window authors
    by most recent post, minus the current author; mentioned users (also
    minus the current author) are then moved or inserted at the top in
    mention order.
    """
    order: list[str] = []
    seen = {current.author}
    for m in reversed(window):
        if m.author not in seen:
            seen.add(m.author)
            order.append(m.author)
    promoted = []
    for name in mentions:
        if name != current.author and name not in promoted:
            promoted.append(name)
    if promoted:
        lifted = set(promoted)
        order = promoted + [u for u in order if u not in lifted]
    length = len(order)
    return [(user, rank_score(r, length)) for r, user in enumerate(order, start=1)]


def _vertex_order(messages: Sequence[Message], extra: Iterable[str]) -> list[str]:
    names = []
    seen = set()
    for name in [m.author for m in messages] + list(extra):
        if name not in seen:
            seen.add(name)
            names.append(name)
    return names


def extract_graph(context: ContextSlice, roster: Iterable[str],
                  cfg: ExtractionConfig) -> ConversationGraph:
    """Build the weighted graph of one context slice.

    Vertices are the slice's authors (first-post order) followed by any
    roster members only reached through mentions.  Weights accumulate as
    exact fractions.
    """
    messages = context.messages
    if not messages:
        raise ValueError("empty context slice")
    roster = frozenset(roster)
    weights: dict[frozenset, Fraction] = {}
    inserted: list[str] = []
    authors = {m.author for m in messages}
    for i, current in enumerate(messages):
        window = messages[max(0, i - cfg.window_size + 1):i + 1]
        mentions = detect_mentions(current.text, roster)
        for user, score in build_neighbor_list(window, current, mentions):
            if user not in authors and user not in inserted:
                inserted.append(user)
            key = frozenset((current.author, user))
            weights[key] = weights.get(key, 0) + score

    names = _vertex_order(messages, inserted)
    index = {name: i for i, name in enumerate(names)}
    edges = {}
    for key, w in weights.items():
        u, v = sorted(index[name] for name in key)
        edges[(u, v)] = w
    return ConversationGraph(names, dict(sorted(edges.items())), index[context.target.author])


@dataclass(frozen=True)
class GraphTriple:
    before: ConversationGraph
    after: ConversationGraph
    full: ConversationGraph

    def __iter__(self):
        return iter((self.before, self.after, self.full))

    def items(self):
        return (("before", self.before), ("after", self.after), ("full", self.full))


def extract_all(channel: ChannelIndex, target_seq: int,
                cfg: ExtractionConfig = ExtractionConfig()) -> GraphTriple:
    """Before, After and Full graphs for the message at ``target_seq``."""
    graphs = [
        extract_graph(slice_context(channel, target_seq, cfg, kind), channel.roster, cfg)
        for kind in (SliceKind.BEFORE, SliceKind.AFTER, SliceKind.FULL)
    ]
    return GraphTriple(*graphs)
