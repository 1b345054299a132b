import io
import json
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from convgraph.chatlog import ChannelIndex, Message, parse_log  # noqa: E402
from convgraph.graphcore import ConversationGraph  # noqa: E402


def make_graph(n, edges, target=0, weights=None):
    names = [f"v{i}" for i in range(n)]
    emap = {}
    for k, (u, v) in enumerate(edges):
        emap[(u, v)] = 1.0 if weights is None else weights[k]
    return ConversationGraph(names, emap, target)


def path_graph(n):
    return make_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return make_graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(n):
    return make_graph(n, [(0, i) for i in range(1, n)])


def complete_graph(n):
    return make_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_edges(rng, n, p):
    return [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]


def channel_of(authors_texts, channel="c"):
    msgs = [Message(f"{channel}-{i}", channel, i, a, t, False) for i, (a, t) in enumerate(authors_texts)]
    return ChannelIndex(channel, tuple(msgs))


def jsonl(records):
    return io.BytesIO("".join(json.dumps(r) + "\n" for r in records).encode("utf-8"))


def record(seq, author="u1", text="hi", channel="c", abusive=False, id=None):
    return {"id": id or f"{channel}-{seq}", "channel": channel, "seq": seq, "author": author,
            "text": text, "abusive": abusive}


@pytest.fixture
def fixture_channel():
    """The three-message hand-traced example."""
    return channel_of([("u1", "hi"), ("u2", "hello"), ("u1", "how are you Alice")]), {"u1", "u2", "alice"}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


PLANTED = dict(n_users=50, n_messages=20000, abuse_rate=0.01, seed=7)
_CORPORA = {}


def planted_dataset(pile_on):
    """Generated corpus and its feature rows at the reference size, cached per session."""
    from convgraph.features import featurize_corpus
    from convgraph.synth import SynthConfig, generate

    if pile_on not in _CORPORA:
        corpus = generate(SynthConfig(pile_on_intensity=pile_on, **PLANTED))
        _CORPORA[pile_on] = (corpus, featurize_corpus(corpus.channels, corpus.targets))
    return _CORPORA[pile_on]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
