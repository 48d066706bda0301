"""Trust scores: how firmly the feature-space neighborhood backs a prediction.

For each evaluated row the score is the distance to the nearest point of any
other class divided by the distance to the nearest point of the predicted
class, after per-feature min-max scaling by training statistics. Scores
below 1 mean the row sits closer to a competing class than to its own.
Nearest neighbors are exact brute force; distances are computed from raw
coordinate differences so coincident points give an exact zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_CHUNK = 512


@dataclass(frozen=True)
class TrustParams:
    k: int = 2
    alpha: float = 0.0
    epsilon: float = 1e-12

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not (0.0 <= self.alpha < 1.0):
            raise ValueError("alpha must lie in [0, 1)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


def _min_sq_dists(eval_x: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Exact minimum squared distance from each eval row to the point set."""
    out = np.full(eval_x.shape[0], np.inf)
    for i in range(0, eval_x.shape[0], _CHUNK):
        block = eval_x[i : i + _CHUNK]
        for j in range(0, pts.shape[0], _CHUNK):
            diff = block[:, None, :] - pts[None, j : j + _CHUNK, :]
            sq = np.einsum("ijk,ijk->ij", diff, diff)
            out[i : i + _CHUNK] = np.minimum(out[i : i + _CHUNK], sq.min(axis=1))
    return out


def _kth_same_class_dist(pts: np.ndarray, k: int) -> np.ndarray:
    """Distance to the k-th nearest same-class neighbor, self excluded."""
    n = pts.shape[0]
    diff = pts[:, None, :] - pts[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(sq, np.inf)
    sq.sort(axis=1)
    if k > n - 1:
        return np.full(n, np.inf)
    return np.sqrt(sq[:, k - 1])


def trust_scores(
    train_x: np.ndarray,
    train_labels,
    eval_x: np.ndarray,
    eval_predicted,
    params: TrustParams = TrustParams(),
) -> np.ndarray:
    """Per-row trust scores for predicted classes of the evaluated rows.

    ``train_x`` / ``eval_x`` must be complete numeric matrices with at least
    two columns; ``train_labels`` must contain at least two classes. With
    alpha > 0, the ceil(alpha * n_c) lowest-density points of each class
    (largest k-th same-class neighbor distance) are dropped before distances
    are measured.
    """
    train_x = np.asarray(train_x, dtype=float)
    eval_x = np.asarray(eval_x, dtype=float)
    if train_x.ndim != 2 or eval_x.ndim != 2:
        raise ValueError("feature matrices must be 2-D")
    if train_x.shape[1] < 2:
        raise ValueError("requires at least 2 numeric features")
    if eval_x.shape[1] != train_x.shape[1]:
        raise ValueError("train and eval must have the same feature count")
    if not (np.isfinite(train_x).all() and np.isfinite(eval_x).all()):
        raise ValueError("feature matrices must be finite (drop incomplete rows upstream)")
    train_labels = list(train_labels)
    eval_predicted = list(eval_predicted)
    if len(train_labels) != train_x.shape[0]:
        raise ValueError("train_labels must align with train_x rows")
    if len(eval_predicted) != eval_x.shape[0]:
        raise ValueError("eval_predicted must align with eval_x rows")
    classes = sorted(set(train_labels))
    if len(classes) < 2:
        raise ValueError("requires at least 2 classes in the training labels")
    for c in eval_predicted:
        if c not in set(classes):
            raise ValueError(f"predicted class '{c}' not present in training labels")

    mins = train_x.min(axis=0)
    ranges = train_x.max(axis=0) - mins
    safe = np.where(ranges > 0, ranges, 1.0)
    train_s = np.where(ranges > 0, (train_x - mins) / safe, 0.0)
    eval_s = np.where(ranges > 0, (eval_x - mins) / safe, 0.0)

    labels_arr = np.array(train_labels, dtype=object)
    retained = {}
    for c in classes:
        pts = train_s[labels_arr == c]
        if params.alpha > 0:
            n_drop = int(np.ceil(params.alpha * pts.shape[0]))
            if n_drop > 0:
                kdist = _kth_same_class_dist(pts, params.k)
                keep_order = np.argsort(kdist, kind="stable")[: pts.shape[0] - n_drop]
                pts = pts[np.sort(keep_order)]
        if pts.shape[0] == 0:
            raise ValueError(f"class '{c}' has no retained points after density filtering")
        retained[c] = pts

    d_by_class = {c: np.sqrt(_min_sq_dists(eval_s, retained[c])) for c in classes}
    scores = np.empty(eval_s.shape[0])
    for i, pred in enumerate(eval_predicted):
        d_pred = d_by_class[pred][i]
        d_other = min(d_by_class[c][i] for c in classes if c != pred)
        scores[i] = d_other / max(d_pred, params.epsilon)
    return scores
