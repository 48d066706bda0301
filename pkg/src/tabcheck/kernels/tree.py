"""A small native CART tree used as the simple baseline model and by PPS.

Greedy binary splits: numeric features split on midpoints of quantile-spaced
distinct values, categorical features split one-vs-rest per category.
Classification uses Gini decrease, regression variance decrease. Ties break
deterministically (lower feature index, then lower threshold /
lexicographically first category), and all float reductions run in a
canonical value order, so fitting is invariant to training-row order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from tabcheck.dataset import Column, ColumnType, Task, parse_number


@dataclass(frozen=True)
class TreeParams:
    max_depth: int = 4
    min_samples_leaf: int = 5
    max_threshold_candidates: int = 64

    def __post_init__(self) -> None:
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")


@dataclass(frozen=True)
class Feature:
    """One feature column prepared for tree fitting.

    Numeric features hold float-or-None cells, categorical features hold
    str-or-None cells. Missing cells fail every split predicate and route
    to the right child.
    """

    name: str
    numeric: bool
    values: tuple

    @classmethod
    def from_column(cls, col: Column) -> "Feature":
        if col.ctype is ColumnType.NUMERIC:
            cells = tuple(parse_number(v) if v is not None else None for v in col.values)
            return cls(col.name, True, cells)
        return cls(col.name, False, col.values)


class TreeNode:
    __slots__ = ("feature", "threshold", "category", "left", "right", "prediction", "proportions", "n_samples")

    def __init__(self, prediction, proportions, n_samples):
        self.feature: Optional[int] = None
        self.threshold: Optional[float] = None
        self.category: Optional[str] = None
        self.left: Optional[TreeNode] = None
        self.right: Optional[TreeNode] = None
        self.prediction = prediction
        self.proportions = proportions
        self.n_samples = n_samples

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())


class DecisionTree:
    def __init__(self, root: TreeNode, feature_names, feature_numeric, task: Task, params: TreeParams):
        self.root = root
        self.feature_names = tuple(feature_names)
        self.feature_numeric = tuple(feature_numeric)
        self.task = task
        self.params = params

    @property
    def is_degenerate(self) -> bool:
        """True when no useful split was found and the tree is a single leaf."""
        return self.root.is_leaf


def _gini_from_counts(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.sum(p * p))


def _var_from_sums(n: int, s: float, s2: float) -> float:
    if n == 0:
        return 0.0
    return max(s2 / n - (s / n) ** 2, 0.0)


class _Fitter:
    def __init__(self, features, y, task, params):
        self.task = task
        self.params = params
        self.n = len(y)
        self.columns = []
        for f in features:
            if f.numeric:
                self.columns.append(np.array([np.nan if v is None else float(v) for v in f.values]))
            else:
                self.columns.append(np.array(f.values, dtype=object))
        self.numeric = [f.numeric for f in features]
        if task is Task.CLASSIFICATION:
            self.labels = sorted(set(y))
            label_index = {c: i for i, c in enumerate(self.labels)}
            self.y = np.array([label_index[v] for v in y], dtype=np.intp)
        else:
            self.y = np.asarray(y, dtype=float)

    # -- order-invariant node statistics ------------------------------------

    def class_counts(self, idx: np.ndarray) -> np.ndarray:
        return np.bincount(self.y[idx], minlength=len(self.labels))

    def reg_sums(self, idx: np.ndarray):
        ys = np.sort(self.y[idx])
        return idx.size, float(np.sum(ys)), float(np.sum(ys * ys))

    def node_impurity(self, idx: np.ndarray) -> float:
        if self.task is Task.CLASSIFICATION:
            return _gini_from_counts(self.class_counts(idx))
        return _var_from_sums(*self.reg_sums(idx))

    def make_leaf(self, idx: np.ndarray) -> TreeNode:
        if self.task is Task.CLASSIFICATION:
            counts = self.class_counts(idx)
            # argmax returns the first maximum; labels are sorted, so class
            # ties resolve to the lexicographically first label.
            prediction = self.labels[int(np.argmax(counts))]
            proportions = {c: float(counts[i] / idx.size) for i, c in enumerate(self.labels)}
            return TreeNode(prediction, proportions, int(idx.size))
        _, s, _ = self.reg_sums(idx)
        return TreeNode(s / idx.size, None, int(idx.size))

    # -- candidate enumeration ----------------------------------------------

    def retained_distinct(self, values: np.ndarray) -> np.ndarray:
        """Distinct sorted values, thinned to quantile-spaced candidates."""
        distinct = np.unique(values)
        cap = self.params.max_threshold_candidates
        if distinct.size > cap:
            pos = np.unique(np.round(np.linspace(0, distinct.size - 1, cap)).astype(int))
            distinct = distinct[pos]
        return distinct

    def categorical_candidates(self, vals: np.ndarray) -> list:
        present = [v for v in vals if v is not None]
        if not present:
            return []
        counts: dict = {}
        for v in present:
            counts[v] = counts.get(v, 0) + 1
        cats = sorted(counts)
        cap = self.params.max_threshold_candidates
        if len(cats) > cap:
            cats = sorted(sorted(counts, key=lambda c: (-counts[c], c))[:cap])
        return cats

    # -- split search ---------------------------------------------------------

    def numeric_splits(self, fi: int, idx: np.ndarray, parent_impurity: float, best):
        vals = self.columns[fi][idx]
        valid = ~np.isnan(vals)
        v = vals[valid]
        if v.size == 0:
            return best
        yv = self.y[idx][valid]
        # Canonical (value, label) ordering makes every prefix sum a pure
        # function of the row multiset.
        order = np.lexsort((yv, v))
        v_s = v[order]
        y_s = yv[order]
        if self.task is Task.CLASSIFICATION:
            onehot = np.zeros((v.size, len(self.labels)))
            onehot[np.arange(v.size), y_s] = 1.0
            cum_counts = np.cumsum(onehot, axis=0)
            total_counts = self.class_counts(idx)
        else:
            cum_y = np.cumsum(y_s)
            cum_y2 = np.cumsum(y_s * y_s)
            n_total, s_total, s2_total = self.reg_sums(idx)
        distinct = self.retained_distinct(v_s)
        if distinct.size < 2:
            return best
        min_leaf = self.params.min_samples_leaf
        for i in range(distinct.size - 1):
            threshold = (float(distinct[i]) + float(distinct[i + 1])) / 2.0
            nl = int(np.searchsorted(v_s, distinct[i], side="right"))
            nr = idx.size - nl
            if nl < min_leaf or nr < min_leaf:
                continue
            if self.task is Task.CLASSIFICATION:
                left_counts = cum_counts[nl - 1]
                right_counts = total_counts - left_counts
                il = _gini_from_counts(left_counts)
                ir = _gini_from_counts(right_counts)
            else:
                sl, sl2 = float(cum_y[nl - 1]), float(cum_y2[nl - 1])
                il = _var_from_sums(nl, sl, sl2)
                ir = _var_from_sums(nr, s_total - sl, s2_total - sl2)
            gain = parent_impurity - (nl * il + nr * ir) / idx.size
            if best is None or gain > best[0]:
                best = (gain, fi, threshold, None)
        return best

    def categorical_splits(self, fi: int, idx: np.ndarray, parent_impurity: float, best):
        vals = self.columns[fi][idx]
        min_leaf = self.params.min_samples_leaf
        for cat in self.categorical_candidates(vals):
            left = vals == cat
            nl = int(left.sum())
            nr = idx.size - nl
            if nl < min_leaf or nr < min_leaf:
                continue
            il = self.node_impurity(idx[left])
            ir = self.node_impurity(idx[~left])
            gain = parent_impurity - (nl * il + nr * ir) / idx.size
            if best is None or gain > best[0]:
                best = (gain, fi, None, cat)
        return best

    def split_mask(self, fi: int, idx: np.ndarray, threshold, category) -> np.ndarray:
        vals = self.columns[fi][idx]
        if threshold is not None:
            with np.errstate(invalid="ignore"):
                return np.nan_to_num(vals, nan=np.inf) <= threshold
        return vals == category

    def build(self, idx: np.ndarray, depth: int) -> TreeNode:
        node = self.make_leaf(idx)
        if depth >= self.params.max_depth or idx.size < 2 * self.params.min_samples_leaf:
            return node
        parent_impurity = self.node_impurity(idx)
        if parent_impurity == 0.0:
            return node
        best = None
        for fi in range(len(self.columns)):
            if self.numeric[fi]:
                best = self.numeric_splits(fi, idx, parent_impurity, best)
            else:
                best = self.categorical_splits(fi, idx, parent_impurity, best)
        if best is None or best[0] <= 0.0:
            return node
        _, fi, threshold, category = best
        left = self.split_mask(fi, idx, threshold, category)
        node.feature = fi
        node.threshold = threshold
        node.category = category
        node.left = self.build(idx[left], depth + 1)
        node.right = self.build(idx[~left], depth + 1)
        return node


def fit_tree(features: Sequence[Feature], y: Sequence, task: Task, params: Optional[TreeParams] = None) -> DecisionTree:
    """Fit a CART tree. All-constant features yield a single-leaf tree."""
    params = params or TreeParams()
    if task not in (Task.CLASSIFICATION, Task.REGRESSION):
        raise ValueError(f"cannot fit a tree for task {task.value}")
    n = len(y)
    if n < 2 * params.min_samples_leaf:
        raise ValueError(f"need at least {2 * params.min_samples_leaf} rows, got {n}")
    lengths = {len(f.values) for f in features}
    if lengths and lengths != {n}:
        raise ValueError("features and labels must have equal lengths")
    fitter = _Fitter(features, y, task, params)
    root = fitter.build(np.arange(n), 0)
    return DecisionTree(root, [f.name for f in features], [f.numeric for f in features], task, params)


def _route(node: TreeNode, row: Sequence) -> TreeNode:
    while not node.is_leaf:
        v = row[node.feature]
        if node.threshold is not None:
            goes_left = v is not None and not (isinstance(v, float) and np.isnan(v)) and v <= node.threshold
        else:
            goes_left = v == node.category
        node = node.left if goes_left else node.right
    return node


def predict_tree(tree: DecisionTree, rows: Sequence[Sequence]) -> list:
    """Predict rows of cells aligned with the tree's training features."""
    return [_route(tree.root, row).prediction for row in rows]


def rows_from_features(features: Sequence[Feature], indices: Optional[Sequence[int]] = None) -> list:
    """Transpose feature columns into prediction rows."""
    cols = [f.values for f in features]
    if not cols:
        return [[]] * (0 if indices is None else len(indices))
    if indices is None:
        return [list(r) for r in zip(*cols)]
    return [[c[i] for c in cols] for i in indices]
