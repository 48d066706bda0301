"""CART tree: split quality, structural contracts, determinism."""

from __future__ import annotations

import numpy as np
import pytest

from tabcheck.dataset import Task
from tabcheck.kernels import Feature, TreeParams, fit_tree, predict_tree
from tabcheck.kernels.tree import rows_from_features


def _leaves(node, out=None):
    if out is None:
        out = []
    if node.is_leaf:
        out.append(node)
    else:
        _leaves(node.left, out)
        _leaves(node.right, out)
    return out


def _structure(node):
    if node.is_leaf:
        return ("leaf", node.prediction, node.n_samples)
    return ("split", node.feature, node.threshold, node.category, _structure(node.left), _structure(node.right))


class TestClassification:
    def test_label_equals_binary_feature(self):
        values = tuple(float(i % 2) for i in range(40))
        y = ["one" if v == 1.0 else "zero" for v in values]
        tree = fit_tree([Feature("f", True, values)], y, Task.CLASSIFICATION)
        assert tree.root.depth() == 1
        rows = [[v] for v in values]
        assert predict_tree(tree, rows) == y

    def test_categorical_feature_split(self):
        values = tuple(["red"] * 20 + ["blue"] * 20)
        y = ["warm"] * 20 + ["cold"] * 20
        tree = fit_tree([Feature("color", False, values)], y, Task.CLASSIFICATION)
        assert predict_tree(tree, [["red"], ["blue"]]) == ["warm", "cold"]

    def test_noise_feature_close_to_majority_rate(self):
        # 4-fold CV accuracy on pure noise stays within 0.1 of the majority
        # class rate (Monte Carlo oracle)
        rng = np.random.RandomState(20)
        n = 200
        x = tuple(rng.uniform(size=n))
        y = ["a" if rng.uniform() < 0.6 else "b" for _ in range(n)]
        correct = 0
        total = 0
        for fold in range(4):
            train_idx = [i for i in range(n) if i % 4 != fold]
            val_idx = [i for i in range(n) if i % 4 == fold]
            feat = Feature("f", True, tuple(x[i] for i in train_idx))
            tree = fit_tree([feat], [y[i] for i in train_idx], Task.CLASSIFICATION)
            preds = predict_tree(tree, [[x[i]] for i in val_idx])
            correct += sum(1 for i, p in zip(val_idx, preds) if y[i] == p)
            total += len(val_idx)
        majority_rate = max(y.count("a"), y.count("b")) / n
        assert abs(correct / total - majority_rate) <= 0.1

    def test_leaf_tie_breaks_lexicographic(self):
        # constant feature, balanced labels: single leaf, first label wins
        tree = fit_tree([Feature("f", True, (1.0,) * 10)], ["b", "a"] * 5, Task.CLASSIFICATION)
        assert tree.root.is_leaf
        assert tree.root.prediction == "a"


class TestRegression:
    def test_linear_target_beats_mean_predictor(self):
        xs = tuple(float(i) for i in range(20))
        y = list(xs)
        tree = fit_tree([Feature("x", True, xs)], y, Task.REGRESSION)
        preds = predict_tree(tree, [[v] for v in xs])
        mae_tree = np.mean(np.abs(np.array(preds) - np.array(y)))
        mae_mean = np.mean(np.abs(np.mean(y) - np.array(y)))
        assert tree.root.depth() <= 4
        assert mae_tree < mae_mean

    def test_leaf_prediction_is_mean(self):
        tree = fit_tree([Feature("x", True, (1.0,) * 12)], [2.0, 4.0] * 6, Task.REGRESSION)
        assert tree.root.is_leaf
        assert tree.root.prediction == pytest.approx(3.0)


class TestStructuralContracts:
    def test_constant_features_give_leaf(self):
        tree = fit_tree(
            [Feature("a", True, (3.0,) * 20), Feature("b", False, ("x",) * 20)],
            ["u", "v"] * 10,
            Task.CLASSIFICATION,
        )
        assert tree.is_degenerate

    def test_min_samples_leaf_and_depth_respected(self):
        rng = np.random.RandomState(5)
        n = 120
        features = [
            Feature("a", True, tuple(rng.uniform(size=n))),
            Feature("b", True, tuple(rng.uniform(size=n))),
        ]
        y = ["p" if rng.uniform() < 0.5 else "q" for _ in range(n)]
        params = TreeParams(max_depth=3, min_samples_leaf=7)
        tree = fit_tree(features, y, Task.CLASSIFICATION, params)
        assert tree.root.depth() <= 3
        for leaf in _leaves(tree.root):
            assert leaf.n_samples >= 7

    def test_too_few_rows_rejected(self):
        with pytest.raises(ValueError, match="at least"):
            fit_tree([Feature("a", True, (1.0, 2.0))], ["x", "y"], Task.CLASSIFICATION)

    def test_missing_values_route_right(self):
        values = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0)
        y = ["lo"] * 5 + ["hi"] * 5
        tree = fit_tree([Feature("x", True, values)], y, Task.CLASSIFICATION, TreeParams(min_samples_leaf=2))
        with_missing = predict_tree(tree, [[None], [np.nan]])
        expected = _rightmost(tree.root)
        assert with_missing == [expected, expected]


class TestDeterminism:
    def _random_problem(self, seed, task):
        rng = np.random.RandomState(seed)
        n = 80
        features = [
            Feature("num", True, tuple(rng.choice([1.0, 2.0, 3.0, 4.0], size=n))),
            Feature("cat", False, tuple(rng.choice(["r", "g", "b"], size=n))),
        ]
        if task is Task.CLASSIFICATION:
            y = list(rng.choice(["x", "y"], size=n))
        else:
            y = list(rng.uniform(size=n))
        return features, y

    @pytest.mark.parametrize("task", [Task.CLASSIFICATION, Task.REGRESSION])
    def test_fit_twice_identical(self, task):
        features, y = self._random_problem(1, task)
        t1 = fit_tree(features, y, task)
        t2 = fit_tree(features, y, task)
        assert _structure(t1.root) == _structure(t2.root)

    @pytest.mark.parametrize("task", [Task.CLASSIFICATION, Task.REGRESSION])
    def test_row_order_invariance(self, task):
        # tie-breaking rules + canonical-order reductions: permuting the
        # training rows must not change any prediction
        for seed in range(5):
            features, y = self._random_problem(seed, task)
            n = len(y)
            grid = rows_from_features(features)
            base = predict_tree(fit_tree(features, y, task), grid)
            perm = np.random.RandomState(seed + 100).permutation(n)
            shuffled = [
                Feature(f.name, f.numeric, tuple(f.values[i] for i in perm)) for f in features
            ]
            shuffled_y = [y[i] for i in perm]
            permuted = predict_tree(fit_tree(shuffled, shuffled_y, task), grid)
            assert permuted == base


def _rightmost(node):
    while not node.is_leaf:
        node = node.right
    return node.prediction
