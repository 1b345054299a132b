import io

import numpy as np
import pytest

from conftest import channel_of
from convgraph.features import (FEATURE_NAMES, N_FEATURES, Dataset, FeatureError, Target, featurize,
                                featurize_corpus, read_dataset_csv, read_targets_csv, write_dataset_csv,
                                write_targets_csv)
from convgraph.graphcore import GLOBAL_NAMES, LOCAL_NAMES
from convgraph.netextract import ExtractionConfig


def test_layout():
    assert N_FEATURES == 75 == len(set(FEATURE_NAMES))
    block = [f"{{}}.{n}" for n in LOCAL_NAMES + GLOBAL_NAMES]
    expected = [b.format(kind) for kind in ("before", "after", "full") for b in block]
    assert list(FEATURE_NAMES) == expected
    assert FEATURE_NAMES[0] == "before.degree_centrality"
    assert FEATURE_NAMES[25 + 9 + 1] == "after.edge_count"
    post = [n for n in FEATURE_NAMES if not n.startswith("before.")]
    assert len(post) == 50


def test_trivial_target():
    ch = channel_of([("u1", "alone")])
    fv = featurize(ch, 0)
    values = dict(zip(FEATURE_NAMES, fv.values))
    for kind in ("before", "after", "full"):
        for name in LOCAL_NAMES + GLOBAL_NAMES:
            expected = 1.0 if name in ("pagerank", "avg_pagerank", "vertex_count") else 0.0
            assert values[f"{kind}.{name}"] == expected, f"{kind}.{name}"
    assert fv.message_id == "c-0" and fv.label is False


def test_fixture_counts():
    # alice posts earlier so she is on the channel roster, outside the context
    ch = channel_of([("alice", "yo"), ("u3", "a"), ("u3", "b"),
                     ("u1", "hi"), ("u2", "hello"), ("u1", "how are you Alice")])
    fv = featurize(ch, 5, ExtractionConfig(context_half_width=2))
    values = dict(zip(FEATURE_NAMES, fv.values))
    assert values["full.edge_count"] == 2
    assert values["full.vertex_count"] == 3
    assert values["after.vertex_count"] == 2  # u1 and the mentioned alice


def test_determinism(rng):
    rows = [(f"u{int(rng.integers(6))}", "hey @u1" if rng.random() < 0.2 else "ok") for _ in range(120)]
    ch = channel_of(rows)
    a = featurize(ch, 60, ExtractionConfig(30, 6))
    b = featurize(ch, 60, ExtractionConfig(30, 6))
    assert a == b
    assert all(np.isfinite(a.values))


def test_label_override_and_message_flag():
    from convgraph.chatlog import ChannelIndex, Message
    ch = ChannelIndex("c", (Message("a", "c", 0, "u", "x", True),))
    assert featurize(ch, 0).label is True
    assert featurize(ch, 0, label=False).label is False


@pytest.fixture
def corpus(rng):
    return {"c": channel_of([(f"u{int(rng.integers(5))}", "w") for _ in range(80)], "c"),
            "d": channel_of([(f"u{int(rng.integers(5))}", "w") for _ in range(40)], "d")}


def test_corpus_order_and_names(corpus):
    targets = [Target("d", 5, True), Target("c", 70, False, "c-70"), Target("c", 3, None)]
    ds = featurize_corpus(corpus, targets, ExtractionConfig(10, 5))
    assert ds.ids == ["d-5", "c-70", "c-3"]
    assert list(ds.y) == [True, False, False]
    assert ds.feature_names == FEATURE_NAMES
    assert ds.X.shape == (3, 75)


def test_corpus_parallel_matches_sequential(corpus):
    targets = [Target("c", s, s % 2 == 0) for s in range(0, 80, 7)]
    seen = []
    a = featurize_corpus(corpus, targets, ExtractionConfig(10, 5), progress=lambda d, t: seen.append((d, t)))
    b = featurize_corpus(corpus, targets, ExtractionConfig(10, 5), jobs=2)
    assert np.array_equal(a.X, b.X) and a.ids == b.ids
    assert seen[-1] == (len(targets), len(targets))


def test_corpus_empty(corpus):
    ds = featurize_corpus(corpus, [])
    assert len(ds.rows) == 0 and ds.feature_names == FEATURE_NAMES
    assert ds.X.shape == (0, 75)


@pytest.mark.parametrize("target", [Target("zz", 0), Target("c", 80), Target("c", 1, None, "c-2")])
def test_corpus_unresolvable(corpus, target):
    with pytest.raises(FeatureError):
        featurize_corpus(corpus, [Target("c", 0), target])


def test_dataset_csv_roundtrip(corpus):
    ds = featurize_corpus(corpus, [Target("c", 10, True), Target("d", 20, False)], ExtractionConfig(10, 5))
    buf = io.StringIO()
    write_dataset_csv(ds, buf)
    header = buf.getvalue().splitlines()[0].split(",")
    assert header[:2] == ["message_id", "label"] and tuple(header[2:]) == FEATURE_NAMES
    back = read_dataset_csv(io.StringIO(buf.getvalue()))
    assert np.array_equal(back.X, ds.X) and back.ids == ds.ids and list(back.y) == list(ds.y)


def test_dataset_csv_errors():
    with pytest.raises(FeatureError):
        read_dataset_csv(io.StringIO(""))
    with pytest.raises(FeatureError):
        read_dataset_csv(io.StringIO("id,y,a\n"))
    with pytest.raises(FeatureError):
        read_dataset_csv(io.StringIO("message_id,label,a\nm,1\n"))
    with pytest.raises(FeatureError):
        read_dataset_csv(io.StringIO("message_id,label,a\nm,1,zz\n"))


def test_dataset_helpers():
    ds = Dataset.from_arrays(np.arange(6.0).reshape(3, 2), [True, False, True], ["a", "b"], ["x", "y", "z"])
    assert ds.subset([2, 0]).ids == ["z", "x"]
    sel = ds.select(["b"])
    assert sel.feature_names == ("b",) and list(sel.X[:, 0]) == [1.0, 3.0, 5.0]


def test_targets_csv_roundtrip():
    targets = [Target("c", 1, True, "c-1"), Target("d", 0, None, None)]
    buf = io.StringIO()
    write_targets_csv(targets, buf)
    assert read_targets_csv(io.StringIO(buf.getvalue())) == targets
    assert read_targets_csv(io.StringIO("channel,seq\nc,3\n")) == [Target("c", 3)]
    with pytest.raises(FeatureError):
        read_targets_csv(io.StringIO("channel,label\n"))
    with pytest.raises(FeatureError):
        read_targets_csv(io.StringIO("channel,seq\nc,x\n"))
