"""Predictive power of a single feature, cross-validated and normalized.

A score near 1 means one feature alone nearly determines the label, which
on real data usually signals leakage rather than insight.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from tabcheck.dataset import Column, Task, parse_number
from tabcheck.kernels.metrics import weighted_f1
from tabcheck.kernels.tree import Feature, TreeParams, fit_tree, predict_tree

MIN_PAIRED_ROWS = 20
N_FOLDS = 4


@dataclass(frozen=True)
class PpsResult:
    value: float
    note: Optional[str] = None


def _clamp01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def pps(feature: Column, label: Column, task: Task, params: Optional[TreeParams] = None) -> PpsResult:
    """Predictive power score of one feature for the label, in [0, 1].

    4-fold cross-validation with fold = paired-row index mod 4 and a
    single-feature tree. Classification compares weighted F1 against the
    most-frequent-class predictor; regression compares MAE against the
    training-fold median. The advantage over the naive baseline is
    normalized to [0, 1]; a perfect naive baseline scores 0.
    """
    if len(feature.values) != len(label.values):
        raise ValueError("feature and label must have the same length")
    params = params or TreeParams()

    feat = Feature.from_column(feature)
    if task is Task.CLASSIFICATION:
        target = list(label.values)
    elif task is Task.REGRESSION:
        target = [None if v is None else parse_number(v) for v in label.values]
    else:
        raise ValueError("pps requires a labeled task")

    paired = [i for i in range(len(target)) if feat.values[i] is not None and target[i] is not None]
    if len(paired) < MIN_PAIRED_ROWS:
        return PpsResult(0.0, f"skipped: only {len(paired)} paired rows (need {MIN_PAIRED_ROWS})")

    model_scores = []
    naive_scores = []
    for fold in range(N_FOLDS):
        train_idx = [paired[i] for i in range(len(paired)) if i % N_FOLDS != fold]
        val_idx = [paired[i] for i in range(len(paired)) if i % N_FOLDS == fold]
        train_feat = Feature(feat.name, feat.numeric, tuple(feat.values[i] for i in train_idx))
        train_y = [target[i] for i in train_idx]
        val_rows = [[feat.values[i]] for i in val_idx]
        val_y = [target[i] for i in val_idx]
        tree = fit_tree([train_feat], train_y, task, params)
        pred = predict_tree(tree, val_rows)
        if task is Task.CLASSIFICATION:
            counts: dict = {}
            for v in train_y:
                counts[v] = counts.get(v, 0) + 1
            top = max(counts.values())
            majority = min(c for c, n in counts.items() if n == top)
            model_scores.append(weighted_f1(val_y, pred))
            naive_scores.append(weighted_f1(val_y, [majority] * len(val_y)))
        else:
            median = float(np.median(np.sort(np.asarray(train_y, dtype=float))))
            model_scores.append(float(np.mean(np.abs(np.asarray(val_y) - np.asarray(pred, dtype=float)))))
            naive_scores.append(float(np.mean(np.abs(np.asarray(val_y) - median))))

    if task is Task.CLASSIFICATION:
        score = sum(model_scores) / N_FOLDS
        naive = sum(naive_scores) / N_FOLDS
        if naive >= 1.0:
            return PpsResult(0.0, "naive predictor is already perfect")
        return PpsResult(_clamp01((score - naive) / (1.0 - naive)))
    mae_model = sum(model_scores) / N_FOLDS
    mae_naive = sum(naive_scores) / N_FOLDS
    if mae_naive == 0.0:
        return PpsResult(0.0, "naive predictor is already perfect")
    return PpsResult(_clamp01(1.0 - mae_model / mae_naive))
