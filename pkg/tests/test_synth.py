import json

import numpy as np
import pytest
from scipy.stats import ks_2samp

from conftest import planted_dataset
from convgraph.chatlog import load_log
from convgraph.features import FEATURE_NAMES, read_targets_csv
from convgraph.synth import SynthConfig, SynthError, generate

SMALL = dict(n_users=12, n_messages=3000, n_channels=2, abuse_rate=0.01, seed=11)


def test_fixed_seed_is_byte_identical(tmp_path):
    for name in ("a", "b"):
        generate(SynthConfig(**SMALL)).write(tmp_path / name)
    for f in ("corpus.jsonl", "targets.csv", "synth_config.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    generate(SynthConfig(**{**SMALL, "seed": 12})).write(tmp_path / "c")
    assert (tmp_path / "a" / "corpus.jsonl").read_bytes() != (tmp_path / "c" / "corpus.jsonl").read_bytes()


def test_output_satisfies_log_invariants(tmp_path):
    corpus = generate(SynthConfig(**SMALL))
    corpus.write(tmp_path)
    chans = load_log(tmp_path / "corpus.jsonl")
    assert chans == corpus.channels
    assert sum(len(c) for c in chans.values()) == SMALL["n_messages"]
    for ch in chans.values():
        assert ch.roster == {m.author for m in ch.messages}
    with open(tmp_path / "targets.csv", newline="") as fh:
        targets = read_targets_csv(fh)
    assert targets == corpus.targets
    for t in targets:
        assert chans[t.channel][t.seq].abusive == t.label
        assert chans[t.channel][t.seq].id == t.message_id
    cfg = json.loads((tmp_path / "synth_config.json").read_text())
    assert cfg["seed"] == 11


def test_label_balance_exact():
    corpus = generate(SynthConfig(**SMALL))
    labels = [t.label for t in corpus.targets]
    assert labels.count(True) == 30 and labels.count(False) == 30
    corpus = generate(SynthConfig(**{**SMALL, "n_normal": 50}))
    labels = [t.label for t in corpus.targets]
    assert labels.count(True) == 30 and labels.count(False) == 50
    flagged = sum(m.abusive for ch in corpus.channels.values() for m in ch.messages)
    assert flagged == 30


def test_burst_styles_recorded():
    corpus = generate(SynthConfig(**SMALL))
    assert set(corpus.burst_styles.values()) <= {"duel", "crowd"}
    assert len(corpus.burst_styles) == 30
    assert generate(SynthConfig(**{**SMALL, "pile_on_intensity": 0.0})).burst_styles == {}


@pytest.mark.parametrize("bad", [
    dict(n_users=2), dict(abuse_rate=0.0), dict(abuse_rate=1.0), dict(pile_on_intensity=-1.0),
    dict(mention_rate=1.5), dict(n_normal=-1), dict(n_messages=0),
])
def test_invalid_config(bad):
    with pytest.raises(SynthError):
        SynthConfig(**{**SMALL, **bad})


def test_infeasible_config():
    with pytest.raises(SynthError):
        generate(SynthConfig(**{**SMALL, "abuse_rate": 0.5}))
    with pytest.raises(SynthError):
        generate(SynthConfig(**{**SMALL, "pile_on_intensity": 0.0, "n_normal": 5000}))


def _after_columns():
    return [j for j, n in enumerate(FEATURE_NAMES) if n.startswith("after.")]


def test_null_corpus_after_features_indistinguishable():
    _, ds = planted_dataset(0.0)
    X, y = ds.X, ds.y
    assert y.sum() == 200 and (~y).sum() == 200
    for j in _after_columns():
        p = ks_2samp(X[y, j], X[~y, j]).pvalue
        assert p > 0.01, (FEATURE_NAMES[j], p)


def test_planted_corpus_raises_after_edge_count():
    _, ds = planted_dataset(3.0)
    j = FEATURE_NAMES.index("after.edge_count")
    assert ds.X[ds.y, j].mean() > ds.X[~ds.y, j].mean()
