"""Synthetic multi-channel chat corpora with planted pile-on dynamics.

Background chatter: each channel has a member list; a message's author is
either someone who spoke recently (conversation persistence) or a member
drawn by activity weight.  An abuse event is an ordinary background message
that gets the abusive label.  When ``pile_on_intensity > 0`` it is followed
by a reply burst in one of two styles (see :meth:`_Channel.pile_on`).
Normal targets are drawn from the remaining background messages, preferring
ones with no burst within ``quiet_horizon`` messages after them, so with
intensity 0 both classes come from the same distribution.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .chatlog import ChannelIndex, Message
from .features import Target, write_targets_csv

WORDS = (
    "ok lol yes no maybe later now gg attack defend fleet base planet trade "
    "alliance moon ship fuel metal crystal research colony war peace help thanks "
    "where when why how what sure nice bad good wait go stop come back see"
).split()

RECENT = 10  # messages scanned for "recent" authors
# crowd-style burst rates, per unit of intensity
CROWD_REENGAGE = 0.03
CROWD_REENGAGE_CAP = 0.15
CROWD_NAME = 0.1


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    n_users: int = 50
    n_messages: int = 20000
    n_channels: int = 4
    abuse_rate: float = 0.01
    pile_on_intensity: float = 3.0
    mention_rate: float = 0.1
    seed: int = 7
    n_normal: int | None = None
    burst_per_intensity: int = 16
    member_fraction: float = 0.6
    persistence: float = 0.6
    activity_spread: float = 0.5
    quiet_horizon: int = 100

    def __post_init__(self):
        if self.n_users < 3:
            raise SynthError("n_users must be >= 3")
        if self.n_channels < 1 or self.n_messages < 1:
            raise SynthError("need at least one channel and one message")
        if not 0.0 < self.abuse_rate < 1.0:
            raise SynthError("abuse_rate must lie in (0, 1)")
        if self.pile_on_intensity < 0:
            raise SynthError("pile_on_intensity must be >= 0")
        if not 0.0 <= self.mention_rate <= 1.0:
            raise SynthError("mention_rate must lie in [0, 1]")
        if self.n_normal is not None and self.n_normal < 0:
            raise SynthError("n_normal must be >= 0")

    @property
    def n_abuse(self) -> int:
        return int(round(self.abuse_rate * self.n_messages))

    @property
    def burst_length(self) -> int:
        return int(round(self.burst_per_intensity * self.pile_on_intensity))


@dataclass
class SynthCorpus:
    channels: dict[str, ChannelIndex]
    targets: list[Target]
    config: SynthConfig
    burst_styles: dict[str, str] = field(default_factory=dict)  # abuse message id -> style

    def write(self, out_dir) -> None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "corpus.jsonl"), "w", encoding="utf-8", newline="\n") as fh:
            for ch in self.channels.values():
                for m in ch.messages:
                    fh.write(json.dumps(m.to_record(), ensure_ascii=False) + "\n")
        with open(os.path.join(out_dir, "targets.csv"), "w", encoding="utf-8", newline="") as fh:
            write_targets_csv(self.targets, fh)
        with open(os.path.join(out_dir, "synth_config.json"), "w", encoding="utf-8") as fh:
            json.dump(asdict(self.config), fh, indent=1, sort_keys=True)
            fh.write("\n")


def _event_positions(length: int, count: int, gap: int, rng: np.random.Generator) -> list[int]:
    """``count`` sorted positions, each followed by ``gap`` free slots inside the channel."""
    free = length - count * gap
    if count == 0:
        return []
    if free < count:
        raise SynthError(f"{count} events with bursts of {gap} do not fit in {length} messages")
    picks = np.sort(rng.choice(free, size=count, replace=False))
    return [int(p) + i * gap for i, p in enumerate(picks)]


class _Channel:
    def __init__(self, name, members, activity, cfg, rng, community):
        self.name = name
        self.members = members
        self.community = community
        self.p_activity = activity / activity.sum()
        self.cfg = cfg
        self.rng = rng
        self.messages: list[Message] = []

    def recent_authors(self) -> list[str]:
        seen = []
        for m in reversed(self.messages[-RECENT:]):
            if m.author not in seen:
                seen.append(m.author)
        return seen

    def filler(self) -> list[str]:
        k = int(self.rng.integers(2, 8))
        return [WORDS[i] for i in self.rng.integers(0, len(WORDS), size=k)]

    def mention_token(self, name: str) -> str:
        style = int(self.rng.integers(0, 3))
        return ("@" + name, name + ":", name)[style]

    def emit(self, author: str, words: list[str], abusive: bool = False) -> Message:
        seq = len(self.messages)
        msg = Message(f"{self.name}-{seq:06d}", self.name, seq, author, " ".join(words), abusive)
        self.messages.append(msg)
        return msg

    def background(self, abusive: bool = False) -> Message:
        rng = self.rng
        recent = self.recent_authors()
        last = recent[0] if recent else None
        partners = [u for u in recent if u != last]
        if partners and rng.random() < self.cfg.persistence:
            author = partners[int(rng.integers(len(partners)))]
        else:
            author = self.members[int(rng.choice(len(self.members), p=self.p_activity))]
        words = self.filler()
        others = [u for u in recent if u != author]
        if others and rng.random() < self.cfg.mention_rate:
            words.insert(int(rng.integers(len(words) + 1)),
                         self.mention_token(others[int(rng.integers(len(others)))]))
        return self.emit(author, words, abusive)

    def pile_on(self, abuser: str, length: int) -> str:
        """Reply burst after an abuse event, in one of two styles.

        *duel*: the abuser keeps posting and trades messages with a couple of
        opponents who name them.  *crowd*: many different members chime in,
        naming the abuser less often, while the abuser mostly stays quiet.
        Duels move the abuser's own centrality, crowds mostly the size of
        the conversation.
        """
        rng = self.rng
        s = self.cfg.pile_on_intensity
        bystanders = [u for u in self.members if u != abuser]
        style = "duel" if rng.random() < 0.5 else "crowd"
        if style == "duel":
            p_reengage = min(0.5, 0.15 * s)
            p_name_abuser = min(0.9, 0.3 * s)
            picks = rng.choice(len(bystanders), size=min(2, len(bystanders)), replace=False)
            responders = [bystanders[int(i)] for i in picks]
        else:
            p_reengage = min(CROWD_REENGAGE_CAP, CROWD_REENGAGE * s)
            p_name_abuser = min(0.9, CROWD_NAME * s)
            responders = [u for u in self.community if u != abuser]
        for _ in range(length):
            words = self.filler()
            if rng.random() < p_reengage:
                recent = [u for u in self.recent_authors() if u != abuser]
                if recent and rng.random() < 0.5:
                    words.insert(0, self.mention_token(recent[int(rng.integers(len(recent)))]))
                self.emit(abuser, words)
            else:
                author = responders[int(rng.integers(len(responders)))]
                if rng.random() < p_name_abuser:
                    words.insert(int(rng.integers(len(words) + 1)), self.mention_token(abuser))
                self.emit(author, words)
        return style


def generate(cfg: SynthConfig) -> SynthCorpus:
    """Build a corpus and a target list with every abuse event and ``n_normal`` normal messages."""
    rng = np.random.default_rng(cfg.seed)
    n_abuse = cfg.n_abuse
    n_normal = n_abuse if cfg.n_normal is None else cfg.n_normal
    burst = cfg.burst_length
    if n_abuse * (burst + 1) > cfg.n_messages:
        raise SynthError(f"{n_abuse} abuse events with bursts of {burst} exceed {cfg.n_messages} messages")

    width = len(str(cfg.n_users - 1))
    users = [f"user{i:0{width}d}" for i in range(cfg.n_users)]
    activity = rng.lognormal(0.0, cfg.activity_spread, size=cfg.n_users)

    base, extra = divmod(cfg.n_messages, cfg.n_channels)
    lengths = [base + (1 if c < extra else 0) for c in range(cfg.n_channels)]
    events_per_channel = rng.multinomial(n_abuse, np.array(lengths) / cfg.n_messages)

    n_members = max(3, int(round(cfg.member_fraction * cfg.n_users)))
    channels: dict[str, ChannelIndex] = {}
    abuse_targets: list[Target] = []
    background_pool: list[tuple[str, int]] = []
    styles: dict[str, str] = {}
    burst_counts: dict[str, np.ndarray] = {}
    for c, (length, n_events) in enumerate(zip(lengths, events_per_channel)):
        name = f"ch{c}"
        member_idx = np.sort(rng.choice(cfg.n_users, size=n_members, replace=False))
        ch = _Channel(name, [users[i] for i in member_idx], activity[member_idx], cfg, rng, users)
        events = set(_event_positions(length, int(n_events), burst, rng))
        while len(ch.messages) < length:
            pos = len(ch.messages)
            if pos in events:
                msg = ch.background(abusive=True)
                abuse_targets.append(Target(name, msg.seq, True, msg.id))
                if burst:
                    styles[msg.id] = ch.pile_on(msg.author, burst)
            else:
                msg = ch.background()
                background_pool.append((name, msg.seq))
        channels[name] = ChannelIndex(name, tuple(ch.messages))
        burst_at = np.zeros(length + 1, dtype=int)
        for e in events:
            burst_at[e + 1:e + 1 + burst] = 1
        burst_counts[name] = np.concatenate([[0], np.cumsum(burst_at)])

    if n_normal > len(background_pool):
        raise SynthError(f"only {len(background_pool)} background messages for {n_normal} normal targets")

    def quiet(name, seq):
        counts = burst_counts[name]
        hi = min(seq + cfg.quiet_horizon, len(counts) - 2)
        return counts[hi + 1] - counts[seq + 1] == 0

    flags = np.array([quiet(name, seq) for name, seq in background_pool], dtype=bool)
    calm = np.flatnonzero(flags)
    busy = np.flatnonzero(~flags)
    take_calm = min(n_normal, len(calm))
    picks = list(rng.choice(calm, size=take_calm, replace=False))
    if take_calm < n_normal:
        picks += list(rng.choice(busy, size=n_normal - take_calm, replace=False))
    normal_targets = []
    for i in picks:
        name, seq = background_pool[int(i)]
        normal_targets.append(Target(name, seq, False, channels[name][seq].id))
    targets = sorted(abuse_targets + normal_targets, key=lambda t: (t.channel, t.seq))
    return SynthCorpus(channels, targets, cfg, styles)
