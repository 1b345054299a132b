"""Property-based checks with hypothesis."""

import io
import string

import numpy as np
from hypothesis import given, settings, strategies as st

from conftest import channel_of, make_graph
from convgraph.chatlog import ChannelIndex, Message, detect_mentions, dump_log, parse_log
from convgraph.graphcore import pagerank
from convgraph.metrics import metrics
from convgraph.netextract import build_neighbor_list

names = st.text(string.ascii_letters + string.digits + "_", min_size=1, max_size=8)
words = st.text(string.ascii_letters + " @:,.", max_size=40)


@given(st.lists(names, max_size=6, unique=True), words)
def test_mentions_are_roster_members_without_duplicates(roster, text):
    found = detect_mentions(text, roster)
    assert len(found) == len(set(found))
    assert set(found) <= set(roster)


@given(st.lists(names, max_size=6, unique_by=str.lower), words)
def test_mentions_ignore_ascii_case(roster, text):
    assert detect_mentions(text.upper(), roster) == detect_mentions(text.lower(), roster)


@given(words)
def test_empty_roster_has_no_mentions(text):
    assert detect_mentions(text, []) == []


@given(st.lists(st.tuples(names, st.text(max_size=30), st.booleans()), min_size=1, max_size=20))
def test_jsonl_round_trip(rows):
    msgs = tuple(Message(f"m{i}", "c", i, a, t, ab) for i, (a, t, ab) in enumerate(rows))
    buf = io.StringIO()
    dump_log([ChannelIndex("c", msgs)], buf)
    back = parse_log(io.StringIO(buf.getvalue()))
    assert back["c"].messages == msgs


@settings(max_examples=200)
@given(st.lists(st.sampled_from("abcdef"), min_size=1, max_size=10),
       st.lists(st.sampled_from("abcdefgh"), max_size=4))
def test_neighbor_list_invariants(authors, mentions):
    window = channel_of([(a, "") for a in authors]).messages
    current = window[-1]
    scored = build_neighbor_list(window, current, mentions)
    users = [u for u, _ in scored]
    assert len(users) == len(set(users))
    assert current.author not in users
    expected = set(authors[:-1]) | set(mentions)
    expected.discard(current.author)
    assert set(users) == expected
    promoted = list(dict.fromkeys(m for m in mentions if m != current.author))
    assert users[:len(promoted)] == promoted
    if scored:
        assert sum(s for _, s in scored) == 1
        assert all(a > b for (_, a), (_, b) in zip(scored, scored[1:]))


@settings(max_examples=100)
@given(st.integers(1, 9), st.data())
def test_pagerank_is_a_distribution(n, data):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    weights = data.draw(st.lists(st.floats(0.1, 10.0), min_size=len(edges), max_size=len(edges)))
    pr = pagerank(make_graph(n, edges, weights=weights))
    assert np.all(pr >= 0)
    assert abs(pr.sum() - 1.0) < 1e-9


@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=60))
def test_metric_ranges_and_harmonic_mean(pairs):
    y = np.array([a for a, _ in pairs])
    pred = np.array([b for _, b in pairs])
    p, r, f = metrics(y, pred)
    assert 0 <= p <= 1 and 0 <= r <= 1 and 0 <= f <= 1
    if p + r > 0:
        assert abs(f - 2 * p * r / (p + r)) < 1e-12
    else:
        assert f == 0
