"""Accuracy metrics: plain accuracy and the summed one-vs-rest Q ratio."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch


@dataclass(frozen=True)
class EvalReport:
    """Per-class one-vs-rest confusion counts plus both accuracy readings.

    ``q_accuracy`` is (sum TP + sum TN) / (n_test * n_classes) over the
    per-class binary confusions; ``plain_accuracy`` is the fraction of
    test samples whose predicted class is correct.
    """

    n_test: int
    n_classes: int
    tp: np.ndarray
    tn: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    plain_accuracy: float
    q_accuracy: float

    def to_dict(self) -> dict:
        return {
            "n_test": self.n_test,
            "n_classes": self.n_classes,
            "tp": self.tp.tolist(),
            "tn": self.tn.tolist(),
            "fp": self.fp.tolist(),
            "fn": self.fn.tolist(),
            "plain_accuracy": self.plain_accuracy,
            "q_accuracy": self.q_accuracy,
        }


def evaluate(predicted, truth, n_classes: int) -> EvalReport:
    """Score predictions against ground truth over `n_classes` classes."""
    predicted = np.asarray(predicted, dtype=int)
    truth = np.asarray(truth, dtype=int)
    if predicted.shape != truth.shape or predicted.ndim != 1:
        raise ShapeMismatch(
            f"label vectors must match: {predicted.shape} vs {truth.shape}"
        )
    n = predicted.size
    if n < 1:
        raise ShapeMismatch("need at least one test sample")
    if n_classes < 1:
        raise ValueError(f"n_classes must be >= 1, got {n_classes}")
    for name, ids in (("predicted", predicted), ("truth", truth)):
        if ids.min() < 0 or ids.max() >= n_classes:
            raise ValueError(f"{name} ids must lie in [0, {n_classes})")

    correct = predicted == truth
    tp = np.zeros(n_classes, dtype=int)
    fp = np.zeros(n_classes, dtype=int)
    fn = np.zeros(n_classes, dtype=int)
    np.add.at(tp, truth[correct], 1)
    np.add.at(fp, predicted[~correct], 1)
    np.add.at(fn, truth[~correct], 1)
    tn = n - tp - fp - fn
    plain = float(tp.sum()) / n
    q = float(tp.sum() + tn.sum()) / (n * n_classes)
    return EvalReport(
        n_test=n,
        n_classes=n_classes,
        tp=tp,
        tn=tn,
        fp=fp,
        fn=fn,
        plain_accuracy=plain,
        q_accuracy=q,
    )
