"""Repeated stratified train/test evaluation and report files.

The protocol is Monte-Carlo cross-validation: ``n_runs`` independent
stratified random splits with ``train_fraction`` of the rows used for
training (defaults 10 and 0.7).  Everything fitted in a run (scaler, SVM,
sigmoid, importance) sees only that run's training rows.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .features import Dataset
from .learn import ImportanceReport, SvmModel, permutation_importance, train
from .metrics import Confusion, confusion, metrics

logger = logging.getLogger(__name__)

PROTOCOL_NOTE = "monte-carlo cross-validation: repeated stratified random train/test splits"

# stream tags for per-run generators
_SPLIT, _BASELINE, _IMPORTANCE = 0, 1, 2


class ProtocolError(ValueError):
    pass


@dataclass(frozen=True)
class FoldPlan:
    n_runs: int = 10
    train_fraction: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if self.n_runs < 1:
            raise ProtocolError("n_runs must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ProtocolError("train_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class ClassifierConfig:
    C: float = 1.0
    gamma: float | str = "auto"
    threshold: float = 0.5
    importance_repeats: int = 5
    n_thresholds: int = 101

    def __post_init__(self):
        if not self.C > 0:
            raise ProtocolError("C must be > 0")
        if self.gamma != "auto" and not (isinstance(self.gamma, (int, float)) and self.gamma > 0):
            raise ProtocolError("gamma must be 'auto' or a positive number")
        if not 0.0 <= self.threshold <= 1.0:
            raise ProtocolError("threshold must lie in [0, 1]")
        if self.importance_repeats < 1:
            raise ProtocolError("importance_repeats must be >= 1")
        if self.n_thresholds < 2:
            raise ProtocolError("n_thresholds must be >= 2")


def _rng(seed: int, run: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, run, stream])


def _stratified_split(y: np.ndarray, frac: float, rng: np.random.Generator):
    n = len(y)
    pos = np.flatnonzero(y)
    neg = np.flatnonzero(~y)
    n_train = int(round(frac * n))
    k_pos = min(max(int(round(frac * len(pos))), 1), len(pos) - 1)
    k_neg = min(max(n_train - k_pos, 1), len(neg) - 1)
    pos = pos[rng.permutation(len(pos))]
    neg = neg[rng.permutation(len(neg))]
    train_idx = np.sort(np.concatenate([pos[:k_pos], neg[:k_neg]]))
    test_idx = np.sort(np.concatenate([pos[k_pos:], neg[k_neg:]]))
    return train_idx, test_idx


def make_folds(labels, plan: FoldPlan = FoldPlan()) -> list[tuple[np.ndarray, np.ndarray]]:
    """``plan.n_runs`` stratified random splits, deterministic in ``plan.seed``.

    Accepts a :class:`Dataset` or a label array.  Each class keeps at least
    one row on both sides of every split.
    """
    y = labels.y if isinstance(labels, Dataset) else np.asarray(labels, dtype=bool)
    if len(y) < 10:
        raise ProtocolError("evaluation needs at least 10 rows")
    n_pos = int(y.sum())
    if n_pos < 2 or len(y) - n_pos < 2:
        raise ProtocolError("both classes need at least two rows")
    return [_stratified_split(y, plan.train_fraction, _rng(plan.seed, r, _SPLIT))
            for r in range(plan.n_runs)]


@dataclass(frozen=True)
class PRPoint:
    threshold: float
    precision: float
    recall: float


def pr_curve_from_scores(labels, probabilities, n_thresholds: int = 101,
                         thresholds: Sequence[float] | None = None) -> list[PRPoint]:
    labels = np.asarray(labels, dtype=bool)
    probabilities = np.asarray(probabilities, dtype=float)
    if len(labels) == 0:
        raise ValueError("empty test set")
    ts = np.linspace(0.0, 1.0, n_thresholds) if thresholds is None else np.asarray(thresholds, dtype=float)
    points = []
    for t in ts:
        p, r, _ = metrics(labels, probabilities >= t)
        points.append(PRPoint(float(t), p, r))
    return points


def pr_curve(model: SvmModel, X, y, n_thresholds: int = 101,
             thresholds: Sequence[float] | None = None) -> list[PRPoint]:
    """Precision/recall of the abuse class over a uniform probability threshold sweep."""
    return pr_curve_from_scores(y, model.predict_proba(X), n_thresholds, thresholds)


@dataclass
class RunResult:
    run: int
    confusion: Confusion
    baseline: Confusion
    pr: list[PRPoint]
    importance: ImportanceReport | None = None

    @property
    def scores(self) -> tuple[float, float, float]:
        c = self.confusion
        return c.precision, c.recall, c.f_measure


def _mean_scores(confusions: Sequence[Confusion]) -> tuple[float, float, float]:
    arr = np.array([(c.precision, c.recall, c.f_measure) for c in confusions])
    return tuple(float(v) for v in arr.mean(axis=0))


@dataclass
class ExperimentReport:
    feature_names: tuple[str, ...]
    runs: list[RunResult] = field(default_factory=list)
    protocol: str = PROTOCOL_NOTE

    @property
    def mean(self) -> tuple[float, float, float]:
        return _mean_scores([r.confusion for r in self.runs])

    @property
    def baseline_mean(self) -> tuple[float, float, float]:
        return _mean_scores([r.baseline for r in self.runs])

    @property
    def mean_f(self) -> float:
        return self.mean[2]

    def mean_pr(self) -> list[PRPoint]:
        curves = [r.pr for r in self.runs]
        out = []
        for i, pt in enumerate(curves[0]):
            out.append(PRPoint(pt.threshold,
                               float(np.mean([c[i].precision for c in curves])),
                               float(np.mean([c[i].recall for c in curves]))))
        return out

    def importance(self) -> ImportanceReport | None:
        reports = [r.importance for r in self.runs if r.importance is not None]
        return ImportanceReport.mean_of(reports) if reports else None


def fit_run(ds: Dataset, train_idx, cfg: ClassifierConfig = ClassifierConfig(),
            seed: int = 0) -> SvmModel:
    """Train the run model on ``train_idx`` only."""
    train_idx = np.asarray(train_idx)
    return train(ds.X[train_idx], ds.y[train_idx], ds.feature_names, C=cfg.C, gamma=cfg.gamma, seed=seed)


def run_importance(ds: Dataset, train_idx, cfg: ClassifierConfig, seed: int, run: int) -> ImportanceReport:
    """Permutation importance from an inner split of the run's training rows."""
    train_idx = np.asarray(train_idx)
    X, y = ds.X[train_idx], ds.y[train_idx]
    inner_fit, inner_val = _stratified_split(y, 0.7, _rng(seed, run, _IMPORTANCE))
    model = train(X[inner_fit], y[inner_fit], ds.feature_names, C=cfg.C, gamma=cfg.gamma, seed=seed + run)
    return permutation_importance(model, X[inner_val], y[inner_val], cfg.importance_repeats,
                                  seed=seed + run, threshold=cfg.threshold)


def _evaluate_run(ds: Dataset, run: int, train_idx, test_idx, cfg: ClassifierConfig,
                  seed: int, with_importance: bool) -> RunResult:
    X, y = ds.X, ds.y
    model = fit_run(ds, train_idx, cfg, seed + run)
    prob = model.predict_proba(X[test_idx])
    y_test = y[test_idx]
    conf = confusion(y_test, prob >= cfg.threshold)
    base_scores = _rng(seed, run, _BASELINE).random(len(test_idx))
    base = confusion(y_test, base_scores >= cfg.threshold)
    pr = pr_curve_from_scores(y_test, prob, cfg.n_thresholds)
    imp = run_importance(ds, train_idx, cfg, seed, run) if with_importance else None
    logger.info("run %d: P=%.3f R=%.3f F=%.3f", run, conf.precision, conf.recall, conf.f_measure)
    return RunResult(run, conf, base, pr, imp)


def _run_job(args):
    return _evaluate_run(*args)


def run_experiment(ds: Dataset, plan: FoldPlan = FoldPlan(), cfg: ClassifierConfig = ClassifierConfig(),
                   with_importance: bool = True, jobs: int = 1) -> ExperimentReport:
    """Train and score one model per split, plus a uniform-random-score baseline.

    The baseline draws one uniform score per test row and thresholds it
    exactly like the calibrated probabilities.
    """
    folds = make_folds(ds, plan)
    tasks = [(ds, r, tr, te, cfg, plan.seed, with_importance) for r, (tr, te) in enumerate(folds)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as pool:
            runs = list(pool.map(_run_job, tasks))
    else:
        runs = [_run_job(t) for t in tasks]
    return ExperimentReport(tuple(ds.feature_names), runs)


def random_baseline_expectation(prevalence: float, threshold: float = 0.5) -> tuple[float, float, float]:
    """Large-sample precision, recall and F of thresholding uniform random scores."""
    p = prevalence
    r = 1.0 - threshold
    return p, r, (2 * p * r / (p + r) if p + r else 0.0)


# -- report files -----------------------------------------------------------------

def _f(v: float) -> str:
    return format(float(v), ".17g")


def write_metrics_csv(report: ExperimentReport, stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["system", "run", "precision", "recall", "f_measure", "tp", "fp", "fn", "tn"])
    for system, pick, mean in (("graph", lambda r: r.confusion, report.mean),
                               ("random_baseline", lambda r: r.baseline, report.baseline_mean)):
        confs = [pick(r) for r in report.runs]
        for r, c in zip(report.runs, confs):
            w.writerow([system, r.run, _f(c.precision), _f(c.recall), _f(c.f_measure), c.tp, c.fp, c.fn, c.tn])
        counts = np.array([(c.tp, c.fp, c.fn, c.tn) for c in confs], dtype=float).mean(axis=0)
        w.writerow([system, "mean", *(_f(v) for v in mean), *(_f(v) for v in counts)])


def write_pr_csv(report: ExperimentReport, stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["run", "threshold", "precision", "recall"])
    for r in report.runs:
        for pt in r.pr:
            w.writerow([r.run, _f(pt.threshold), _f(pt.precision), _f(pt.recall)])
    for pt in report.mean_pr():
        w.writerow(["mean", _f(pt.threshold), _f(pt.precision), _f(pt.recall)])


def write_importance_csv(imp: ImportanceReport, stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["rank", "feature", "importance", "importance_clamped", "std"])
    std = dict(zip(imp.feature_names, imp.std))
    raw = dict(zip(imp.feature_names, imp.scores))
    for rank, (name, shown) in enumerate(imp.ranking(), start=1):
        w.writerow([rank, name, _f(raw[name]), _f(shown), _f(std[name])])


def read_importance_csv(stream: IO[str]) -> ImportanceReport:
    rows = list(csv.DictReader(stream))
    names = tuple(r["feature"] for r in rows)
    return ImportanceReport(names, np.array([float(r["importance"]) for r in rows]),
                            np.array([float(r.get("std") or 0.0) for r in rows]))


def write_ablation_csv(curve, stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["step", "features_remaining", "removed_feature", "mean_f_measure"])
    for step, (k, removed, score) in enumerate(curve):
        w.writerow([step, k, removed or "", _f(score)])
