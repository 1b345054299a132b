"""Self-contained margin classifier: scaler, SMO-trained RBF SVM, Platt sigmoid."""

from .importance import ImportanceReport, ablation_run, permutation_importance
from .model import (ModelMismatchError, Scaler, SvmModel, TrainingError, auto_gamma, predict,
                    train, train_dataset)
from .platt import fit_platt, sigmoid
from .smo import rbf_kernel, solve_dual

__all__ = [
    "ImportanceReport",
    "ModelMismatchError",
    "Scaler",
    "SvmModel",
    "TrainingError",
    "ablation_run",
    "auto_gamma",
    "fit_platt",
    "permutation_importance",
    "predict",
    "rbf_kernel",
    "sigmoid",
    "solve_dual",
    "train",
    "train_dataset",
]
