"""Permutation importance and feature ablation."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..metrics import f_measure
from .model import SvmModel, train


@dataclass(frozen=True)
class ImportanceReport:
    feature_names: tuple[str, ...]
    scores: np.ndarray  # mean F drop, raw (may be negative)
    std: np.ndarray

    def ranking(self) -> list[tuple[str, float]]:
        """Most important first, negative drops shown as 0; ties keep column order."""
        order = sorted(range(len(self.scores)), key=lambda i: (-self.scores[i], i))
        return [(self.feature_names[i], max(0.0, float(self.scores[i]))) for i in order]

    def removal_order(self) -> list[str]:
        """Least important first (the order features are ablated in)."""
        order = sorted(range(len(self.scores)), key=lambda i: (self.scores[i], i))
        return [self.feature_names[i] for i in order]

    @classmethod
    def mean_of(cls, reports: Sequence["ImportanceReport"]) -> "ImportanceReport":
        scores = np.mean([r.scores for r in reports], axis=0)
        std = np.std([r.scores for r in reports], axis=0)
        return cls(reports[0].feature_names, scores, std)


def permutation_importance(model: SvmModel, X, y, repeats: int = 5, seed: int = 0,
                           threshold: float = 0.5) -> ImportanceReport:
    """Mean drop of abuse-class F when one column is shuffled within the rows.

    Columns are visited in order and each gets ``repeats`` permutations drawn
    from a single generator seeded with ``seed``.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=bool)
    if len(X) == 0:
        raise ValueError("permutation importance needs validation rows")
    rng = np.random.default_rng(seed)
    base = f_measure(y, model.predict_proba(X) >= threshold)
    drops = np.zeros((X.shape[1], repeats))
    for j in range(X.shape[1]):
        column = X[:, j].copy()
        Xp = X.copy()
        for r in range(repeats):
            Xp[:, j] = column[rng.permutation(len(column))]
            if np.array_equal(Xp[:, j], column):
                drops[j, r] = 0.0
                continue
            drops[j, r] = base - f_measure(y, model.predict_proba(Xp) >= threshold)
    return ImportanceReport(tuple(model.feature_names), drops.mean(axis=1), drops.std(axis=1))


def _fold_f(X, y, cols, folds, seed, C, gamma) -> float:
    scores = []
    for run, (train_idx, test_idx) in enumerate(folds):
        model = train(X[np.ix_(train_idx, cols)], y[train_idx], C=C, gamma=gamma, seed=seed + run)
        scores.append(f_measure(y[test_idx], model.predict_proba(X[np.ix_(test_idx, cols)]) >= 0.5))
    return float(np.mean(scores))


def _ablation_step(args):
    return _fold_f(*args)


def ablation_run(ds, removal_order: Sequence[str], folds, seed: int = 0, C: float = 1.0,
                 gamma: float | str = "auto", jobs: int = 1) -> list[tuple[int, str | None, float]]:
    """Remove features least-important first, retraining on every fold at each step.

    Returns ``(features_remaining, last_removed, mean_F)`` from the full set
    down to one remaining feature.  Fold ``r`` always trains with seed
    ``seed + r``, so steps differ only in their columns.
    """
    names = list(ds.feature_names)
    if sorted(removal_order) != sorted(names):
        raise ValueError("removal order must be a permutation of the dataset features")
    X, y = ds.X, ds.y
    folds = [(np.asarray(a), np.asarray(b)) for a, b in folds]
    steps = []
    remaining = list(names)
    removed = None
    for k in range(len(names)):
        cols = [names.index(n) for n in remaining]
        steps.append((len(remaining), removed, cols))
        if len(remaining) == 1:
            break
        removed = removal_order[k]
        remaining.remove(removed)
    tasks = [(X, y, cols, folds, seed, C, gamma) for _, _, cols in steps]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            scores = list(pool.map(_ablation_step, tasks))
    else:
        scores = [_ablation_step(t) for t in tasks]
    return [(k, rem, s) for (k, rem, _), s in zip(steps, scores)]
