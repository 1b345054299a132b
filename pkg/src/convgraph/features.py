"""Fixed 75-column feature layout for targeted messages."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import IO, Callable, Iterable, Mapping, Sequence

import numpy as np

from .chatlog import ChannelIndex
from .graphcore import GLOBAL_NAMES, LOCAL_NAMES, graph_measures
from .netextract import ExtractionConfig, extract_all

logger = logging.getLogger(__name__)

GRAPH_KINDS = ("before", "after", "full")
FEATURE_NAMES: tuple[str, ...] = tuple(
    f"{kind}.{name}" for kind in GRAPH_KINDS for name in LOCAL_NAMES + GLOBAL_NAMES
)
N_FEATURES = len(FEATURE_NAMES)
assert N_FEATURES == 75


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureVector:
    message_id: str
    label: bool
    values: tuple[float, ...]


@dataclass(frozen=True)
class Target:
    channel: str
    seq: int
    label: bool | None = None
    message_id: str | None = None


@dataclass
class Dataset:
    """Rows of features with their names; ``X``/``y`` give numpy views."""

    rows: list[FeatureVector]
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        if len(set(self.feature_names)) != len(self.feature_names):
            raise FeatureError("feature names must be unique")
        width = len(self.feature_names)
        for row in self.rows:
            if len(row.values) != width:
                raise FeatureError(f"row {row.message_id!r} has {len(row.values)} values, expected {width}")

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def X(self) -> np.ndarray:
        return np.array([r.values for r in self.rows], dtype=float).reshape(len(self.rows), len(self.feature_names))

    @property
    def y(self) -> np.ndarray:
        return np.array([r.label for r in self.rows], dtype=bool)

    @property
    def ids(self) -> list[str]:
        return [r.message_id for r in self.rows]

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset([self.rows[i] for i in indices], self.feature_names)

    def select(self, names: Sequence[str]) -> "Dataset":
        cols = [self.feature_names.index(n) for n in names]
        rows = [FeatureVector(r.message_id, r.label, tuple(r.values[c] for c in cols)) for r in self.rows]
        return Dataset(rows, tuple(names))

    @classmethod
    def from_arrays(cls, X, y, names=None, ids=None) -> "Dataset":
        X = np.asarray(X, dtype=float)
        names = tuple(names) if names is not None else tuple(f"f{i}" for i in range(X.shape[1]))
        ids = ids if ids is not None else [str(i) for i in range(len(X))]
        rows = [FeatureVector(ids[i], bool(y[i]), tuple(float(v) for v in X[i])) for i in range(len(X))]
        return cls(rows, names)


def featurize(channel: ChannelIndex, target_seq: int,
              cfg: ExtractionConfig = ExtractionConfig(), label: bool | None = None) -> FeatureVector:
    """Extract the three graphs around one message and lay out their measures."""
    message = channel[target_seq]
    values: list[float] = []
    for _, g in extract_all(channel, target_seq, cfg).items():
        local, glob = graph_measures(g)
        values.extend(local.values())
        values.extend(glob.values())
    if not all(math.isfinite(v) for v in values):
        raise FeatureError(f"non-finite feature for message {message.id!r}")
    return FeatureVector(message.id, message.abusive if label is None else label, tuple(values))


# per-process state for parallel featurization
_WORKER_CHANNELS: Mapping[str, ChannelIndex] = {}


def _init_worker(channels):
    global _WORKER_CHANNELS
    _WORKER_CHANNELS = channels


def _featurize_job(args):
    channel, seq, label, cfg = args
    return featurize(_WORKER_CHANNELS[channel], seq, cfg, label)


def _resolve(channels: Mapping[str, ChannelIndex], t: Target) -> None:
    ch = channels.get(t.channel)
    if ch is None or not 0 <= t.seq < len(ch):
        ident = t.message_id or f"{t.channel}:{t.seq}"
        raise FeatureError(f"unresolvable target {ident}")
    if t.message_id is not None and ch[t.seq].id != t.message_id:
        raise FeatureError(
            f"target {t.message_id!r} does not match message {ch[t.seq].id!r} at {t.channel}:{t.seq}")


def featurize_corpus(channels: Mapping[str, ChannelIndex], targets: Iterable[Target],
                     cfg: ExtractionConfig = ExtractionConfig(), jobs: int = 1,
                     progress: Callable[[int, int], None] | None = None) -> Dataset:
    """One row per target, in target order.

    All targets are resolved before any work starts, so a bad target aborts
    immediately.  ``progress(done, total)`` is called after every row.
    """
    targets = list(targets)
    for t in targets:
        _resolve(channels, t)
    total = len(targets)
    jobs_args = [(t.channel, t.seq, t.label, cfg) for t in targets]
    rows: list[FeatureVector] = []
    if jobs > 1 and total > 1:
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(dict(channels),)) as pool:
            for row in pool.map(_featurize_job, jobs_args, chunksize=max(1, total // (4 * jobs))):
                rows.append(row)
                if progress:
                    progress(len(rows), total)
    else:
        for channel, seq, label, _ in jobs_args:
            rows.append(featurize(channels[channel], seq, cfg, label))
            if progress:
                progress(len(rows), total)
    return Dataset(rows)


def _fmt(v: float) -> str:
    return format(v, ".17g")


def write_dataset_csv(ds: Dataset, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["message_id", "label", *ds.feature_names])
    for r in ds.rows:
        writer.writerow([r.message_id, int(r.label), *(_fmt(v) for v in r.values)])


def read_dataset_csv(stream: IO[str]) -> Dataset:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise FeatureError("empty feature file") from None
    if header[:2] != ["message_id", "label"]:
        raise FeatureError("feature file must start with message_id,label columns")
    names = tuple(header[2:])
    rows = []
    for line_no, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != len(header):
            raise FeatureError(f"line {line_no}: expected {len(header)} columns, got {len(rec)}")
        try:
            values = tuple(float(v) for v in rec[2:])
        except ValueError as exc:
            raise FeatureError(f"line {line_no}: {exc}") from None
        rows.append(FeatureVector(rec[0], rec[1] in ("1", "true", "True"), values))
    return Dataset(rows, names)


def read_targets_csv(stream: IO[str]) -> list[Target]:
    """Targets file with columns ``channel,seq`` and optional ``label``, ``message_id``."""
    reader = csv.DictReader(stream)
    if reader.fieldnames is None or not {"channel", "seq"} <= set(reader.fieldnames):
        raise FeatureError("targets file needs channel and seq columns")
    targets = []
    for line_no, rec in enumerate(reader, start=2):
        try:
            seq = int(rec["seq"])
        except ValueError:
            raise FeatureError(f"line {line_no}: bad seq {rec['seq']!r}") from None
        label = rec.get("label")
        label = None if label in (None, "") else label in ("1", "true", "True")
        targets.append(Target(rec["channel"], seq, label, rec.get("message_id") or None))
    return targets


def write_targets_csv(targets: Iterable[Target], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["message_id", "channel", "seq", "label"])
    for t in targets:
        writer.writerow([t.message_id or "", t.channel, t.seq, "" if t.label is None else int(t.label)])
