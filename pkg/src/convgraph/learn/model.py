"""Standardised RBF SVM with Platt-calibrated probabilities."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .platt import fit_platt, sigmoid
from .smo import rbf_kernel, solve_dual

MODEL_FORMAT = "convgraph-svm/1"


class TrainingError(ValueError):
    pass


class ModelMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Scaler:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Scaler":
        X = np.asarray(X, dtype=float)
        return cls(X.mean(axis=0), X.std(axis=0))

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        live = self.std > 0
        Z = (X - self.mean) / np.where(live, self.std, 1.0)
        Z[:, ~live] = 0.0
        return Z


@dataclass(frozen=True)
class SvmModel:
    feature_names: tuple[str, ...]
    scaler: Scaler
    gamma: float
    C: float
    support_vectors: np.ndarray  # standardised rows
    dual_coef: np.ndarray  # alpha_i * y_i
    bias: float
    platt_a: float
    platt_b: float

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise ModelMismatchError(f"expected {self.n_features} features, got {X.shape[1]}")
        Z = self.scaler.transform(X)
        if len(self.dual_coef) == 0:
            return np.full(len(Z), self.bias)
        return rbf_kernel(Z, self.support_vectors, self.gamma) @ self.dual_coef + self.bias

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(self.platt_a * self.decision_function(X) + self.platt_b)

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "feature_names": list(self.feature_names),
            "scaler": {"mean": self.scaler.mean.tolist(), "std": self.scaler.std.tolist()},
            "kernel": {"type": "rbf", "gamma": self.gamma},
            "C": self.C,
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "bias": self.bias,
            "platt": {"A": self.platt_a, "B": self.platt_b},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, doc: dict) -> "SvmModel":
        if doc.get("format") != MODEL_FORMAT:
            raise ModelMismatchError(f"unsupported model format {doc.get('format')!r}")
        if doc["kernel"]["type"] != "rbf":
            raise ModelMismatchError(f"unsupported kernel {doc['kernel']['type']!r}")
        names = tuple(doc["feature_names"])
        sv = np.array(doc["support_vectors"], dtype=float).reshape(-1, len(names))
        return cls(
            names,
            Scaler(np.array(doc["scaler"]["mean"], dtype=float), np.array(doc["scaler"]["std"], dtype=float)),
            float(doc["kernel"]["gamma"]),
            float(doc["C"]),
            sv,
            np.array(doc["dual_coef"], dtype=float),
            float(doc["bias"]),
            float(doc["platt"]["A"]),
            float(doc["platt"]["B"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "SvmModel":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "SvmModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def check_names(self, names: Sequence[str]) -> None:
        if tuple(names) != self.feature_names:
            raise ModelMismatchError("feature names of the data do not match the model")


def auto_gamma(Z: np.ndarray) -> float:
    """``1 / (n_features * mean per-feature variance)`` of the standardised data."""
    var = float(Z.var(axis=0).mean()) if Z.size else 0.0
    return 1.0 / (Z.shape[1] * var) if var > 0 else 1.0


def _fit_svm(Z: np.ndarray, y: np.ndarray, C: float, gamma: float, tol: float):
    signs = np.where(y, 1.0, -1.0)
    K = rbf_kernel(Z, Z, gamma)
    np.fill_diagonal(K, 1.0)
    res = solve_dual(K, signs, C, tol)
    sv = res.alpha > 0
    return Z[sv], res.alpha[sv] * signs[sv], res.bias


def _decision(Z, sv, coef, bias, gamma):
    if len(coef) == 0:
        return np.full(len(Z), bias)
    return rbf_kernel(Z, sv, gamma) @ coef + bias


def _calibration_split(y: np.ndarray, rng: np.random.Generator, frac: float = 0.8):
    fit_idx, hold_idx = [], []
    for cls in (True, False):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(len(idx))]
        k = int(round(frac * len(idx)))
        k = min(max(k, 1), len(idx) - 1)
        fit_idx.append(idx[:k])
        hold_idx.append(idx[k:])
    return np.sort(np.concatenate(fit_idx)), np.sort(np.concatenate(hold_idx))


def train(X, y, feature_names: Sequence[str] | None = None, C: float = 1.0,
          gamma: float | str = "auto", seed: int = 0, tol: float = 1e-3) -> SvmModel:
    """Fit scaler, RBF SVM and Platt sigmoid on the given rows.

    The sigmoid is fitted on decision values of a model trained on a
    stratified 80% of the rows and evaluated on the remaining 20%; the
    returned SVM itself uses every row.  With fewer than 5 rows in either
    class the sigmoid falls back to in-sample decision values.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=bool)
    if X.ndim != 2 or len(X) != len(y):
        raise TrainingError("X must be 2-D with one label per row")
    names = tuple(feature_names) if feature_names is not None else tuple(f"f{i}" for i in range(X.shape[1]))
    if len(names) != X.shape[1]:
        raise TrainingError("feature_names length does not match X")
    if len(y) < 2 or y.all() or not y.any():
        raise TrainingError("training needs at least one row of each class")
    if C <= 0:
        raise TrainingError("C must be positive")

    scaler = Scaler.fit(X)
    Z = scaler.transform(X)
    g = auto_gamma(Z) if gamma == "auto" else float(gamma)
    if g <= 0:
        raise TrainingError("gamma must be positive")
    sv, coef, bias = _fit_svm(Z, y, C, g, tol)

    n_pos = int(y.sum())
    if min(n_pos, len(y) - n_pos) >= 5:
        fit_idx, hold_idx = _calibration_split(y, np.random.default_rng(seed))
        cal_sv, cal_coef, cal_bias = _fit_svm(Z[fit_idx], y[fit_idx], C, g, tol)
        a, b = fit_platt(_decision(Z[hold_idx], cal_sv, cal_coef, cal_bias, g), y[hold_idx])
    else:
        a, b = fit_platt(_decision(Z, sv, coef, bias, g), y)
    return SvmModel(names, scaler, g, float(C), sv, coef, bias, a, b)


def train_dataset(ds, C: float = 1.0, gamma: float | str = "auto", seed: int = 0) -> SvmModel:
    return train(ds.X, ds.y, ds.feature_names, C=C, gamma=gamma, seed=seed)


def predict(model: SvmModel, X, threshold: float = 0.5):
    """Labels, probabilities and decision values.

    A single row gives scalars ``(label, probability, decision)``; a 2-D
    array gives three arrays.
    """
    arr = np.asarray(X, dtype=float)
    single = arr.ndim == 1
    dec = model.decision_function(arr)
    prob = sigmoid(model.platt_a * dec + model.platt_b)
    labels = prob >= threshold
    if single:
        return bool(labels[0]), float(prob[0]), float(dec[0])
    return labels, prob, dec
