"""Performance metrics, Brier scores and calibration curves."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from tabcheck.dataset import Task


@dataclass(frozen=True)
class MetricSet:
    """Standard task metrics; only the fields for the task are populated."""

    task: Task
    accuracy: Optional[float] = None
    macro_f1: Optional[float] = None
    per_class: Optional[dict] = None
    rmse: Optional[float] = None
    mae: Optional[float] = None
    r2: Optional[float] = None

    def as_dict(self) -> dict:
        if self.task is Task.CLASSIFICATION:
            return {
                "task": self.task.value,
                "accuracy": self.accuracy,
                "macro_f1": self.macro_f1,
                "per_class": self.per_class,
            }
        return {"task": self.task.value, "rmse": self.rmse, "mae": self.mae, "r2": self.r2}


def per_class_stats(y_true: Sequence, y_pred: Sequence, classes: Optional[Sequence] = None) -> dict:
    """Per-class precision/recall/F1/support with 0/0 defined as 0."""
    if classes is None:
        classes = sorted(set(y_true) | set(y_pred))
    out = {}
    for c in classes:
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == c and p == c)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != c and p == c)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == c and p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        out[c] = {"precision": precision, "recall": recall, "f1": f1, "support": tp + fn}
    return out


def weighted_f1(y_true: Sequence, y_pred: Sequence) -> float:
    """F1 averaged over classes, weighted by true-class support."""
    stats = per_class_stats(y_true, y_pred)
    n = len(y_true)
    if n == 0:
        raise ValueError("empty input")
    return sum(s["f1"] * s["support"] for s in stats.values()) / n


def compute_metrics(
    task: Task,
    y_true: Sequence,
    y_pred: Sequence,
    probs: Optional[Sequence] = None,
    classes: Optional[Sequence] = None,
) -> MetricSet:
    """Compute the standard metric set for a task.

    Classification: accuracy, macro-F1 (unweighted mean of per-class F1)
    and per-class precision/recall. Regression: RMSE, MAE and R^2 with
    R^2 = 0 when the label variance is zero. ``probs`` is accepted for
    interface symmetry; probability quality is scored by brier_score.
    """
    if len(y_true) != len(y_pred):
        raise ValueError(f"y_true has {len(y_true)} rows, y_pred has {len(y_pred)}")
    if len(y_true) == 0:
        raise ValueError("empty input")
    if task is Task.CLASSIFICATION:
        stats = per_class_stats(y_true, y_pred, classes)
        accuracy = sum(1 for t, p in zip(y_true, y_pred) if t == p) / len(y_true)
        macro = sum(s["f1"] for s in stats.values()) / len(stats)
        return MetricSet(task=task, accuracy=accuracy, macro_f1=macro, per_class=stats)
    if task is Task.REGRESSION:
        t = np.asarray(y_true, dtype=float)
        p = np.asarray(y_pred, dtype=float)
        err = t - p
        rmse = float(np.sqrt(np.mean(err**2)))
        mae = float(np.mean(np.abs(err)))
        ss_res = float(np.sum(err**2))
        ss_tot = float(np.sum((t - t.mean()) ** 2))
        r2 = 0.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
        return MetricSet(task=task, rmse=rmse, mae=mae, r2=r2)
    raise ValueError(f"cannot compute metrics for task {task.value}")


def brier_score(probs: Sequence[Sequence[float]], labels: Sequence, classes: Sequence) -> float:
    """Multiclass Brier score: mean over rows of sum_c (p_c - 1[y=c])^2.

    Each probability row must sum to 1 within 1e-6. In the binary case this
    is twice the classic per-class mean squared error; the sum convention
    (range [0, 2] for binary) is reported as-is.
    """
    mat = np.asarray(probs, dtype=float)
    if mat.ndim != 2:
        raise ValueError("probs must be a 2-D row-per-sample array")
    if mat.shape[0] != len(labels):
        raise ValueError(f"{mat.shape[0]} probability rows but {len(labels)} labels")
    if mat.shape[1] != len(classes):
        raise ValueError(f"{mat.shape[1]} probability columns but {len(classes)} classes")
    sums = mat.sum(axis=1)
    bad = np.where(np.abs(sums - 1.0) > 1e-6)[0]
    if bad.size:
        raise ValueError(f"probability row {bad[0]} sums to {sums[bad[0]]}, expected 1")
    index = {c: i for i, c in enumerate(classes)}
    onehot = np.zeros_like(mat)
    for i, y in enumerate(labels):
        if y not in index:
            raise ValueError(f"label '{y}' not in classes")
        onehot[i, index[y]] = 1.0
    return float(np.mean(np.sum((mat - onehot) ** 2, axis=1)))


def calibration_bins(
    probs_for_class: Sequence[float],
    is_class: Sequence[bool],
    n_bins: int = 10,
) -> list:
    """Calibration curve points: (mean predicted, fraction positive, count).

    Rows are assigned to ``n_bins`` equal-width bins over [0, 1] with the
    last bin closed on the right; empty bins are omitted.
    """
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    p = np.asarray(probs_for_class, dtype=float)
    y = np.asarray(is_class, dtype=bool)
    if p.size != y.size:
        raise ValueError("probs and labels must have the same length")
    if p.size and (p.min() < 0 or p.max() > 1):
        raise ValueError("probabilities must lie in [0, 1]")
    idx = np.minimum((p * n_bins).astype(int), n_bins - 1)
    out = []
    for b in range(n_bins):
        mask = idx == b
        count = int(mask.sum())
        if count == 0:
            continue
        out.append((float(p[mask].mean()), float(y[mask].mean()), count))
    return out
