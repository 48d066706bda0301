"""Predictive power score: perfect predictors, noise floors, degenerate labels."""

from __future__ import annotations

import numpy as np
import pytest

from tabcheck.dataset import Column, Task
from tabcheck.kernels import pps


def _col(name, cells):
    return Column.build(name, cells)


class TestClassificationPps:
    def test_label_copy_is_one(self):
        cells = ["a", "b"] * 60
        score = pps(_col("f", cells), _col("y", list(cells)), Task.CLASSIFICATION)
        assert score.value == 1.0

    def test_three_class_copy_is_one(self):
        cells = ["a", "b", "c"] * 40
        score = pps(_col("f", cells), _col("y", list(cells)), Task.CLASSIFICATION)
        assert score.value == 1.0

    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    def test_block_ordered_copies_reach_one(self, k):
        # block layout keeps >= 2 classes in every mod-4 fold, the
        # precondition for a copy feature to score exactly 1
        cells = [f"c{i}" for i in range(k) for _ in range(60)]
        score = pps(_col("f", cells), _col("y", list(cells)), Task.CLASSIFICATION)
        assert score.value == 1.0

    def test_period_four_labels_defeat_mod_folds(self):
        # labels cycling with period 4 leave one class per validation fold
        # (outside the copy invariant's precondition); the normalized score
        # collapses to 0 rather than misreporting predictive power
        cells = [f"c{i % 4}" for i in range(160)]
        score = pps(_col("f", cells), _col("y", list(cells)), Task.CLASSIFICATION)
        assert score.value == 0.0

    def test_independent_noise_near_zero(self):
        # 70/30 labels: the weighted-F1 normalization rewards varied
        # predictions on perfectly balanced labels, so the noise floor is
        # only tight away from the 50/50 case
        rng = np.random.RandomState(77)
        n = 1000
        feature = [f"{v:.6f}" for v in rng.uniform(size=n)]
        label = ["a" if rng.uniform() < 0.7 else "b" for _ in range(n)]
        score = pps(_col("f", feature), _col("y", label), Task.CLASSIFICATION)
        assert score.value <= 0.05

    def test_constant_label_is_zero(self):
        score = pps(_col("f", [str(i) for i in range(100)]), _col("y", ["a"] * 100), Task.CLASSIFICATION)
        assert score.value == 0.0
        assert "perfect" in score.note

    def test_too_few_rows_skipped(self):
        score = pps(_col("f", ["1", "2"] * 5), _col("y", ["a", "b"] * 5), Task.CLASSIFICATION)
        assert score.value == 0.0
        assert "skipped" in score.note

    def test_missing_rows_excluded_from_pair_count(self):
        feature = ["1", ""] * 12
        label = ["a"] * 24
        score = pps(_col("f", feature), _col("y", label), Task.CLASSIFICATION)
        assert "skipped: only 12 paired rows" in score.note


class TestRegressionPps:
    def test_feature_equals_label_scores_high(self):
        cells = [str(float(i)) for i in range(100)]
        score = pps(_col("f", cells), _col("y", list(cells)), Task.REGRESSION)
        assert score.value > 0.5

    def test_independent_noise_near_zero(self):
        rng = np.random.RandomState(13)
        n = 1000
        feature = [f"{v:.6f}" for v in rng.uniform(size=n)]
        label = [f"{v:.6f}" for v in rng.uniform(size=n)]
        score = pps(_col("f", feature), _col("y", label), Task.REGRESSION)
        assert score.value <= 0.05

    def test_constant_label_is_zero(self):
        score = pps(_col("f", [str(i) for i in range(50)]), _col("y", ["3.0"] * 50), Task.REGRESSION)
        assert score.value == 0.0


def test_always_in_unit_interval():
    rng = np.random.RandomState(5)
    for seed in range(10):
        n = 60
        feature = [str(v) for v in rng.randint(0, 4, size=n)]
        label = [rng.choice(["u", "v", "w"]) for _ in range(n)]
        score = pps(_col("f", feature), _col("y", label), Task.CLASSIFICATION)
        assert 0.0 <= score.value <= 1.0


def test_length_mismatch_rejected():
    with pytest.raises(ValueError):
        pps(_col("f", ["1"] * 10), _col("y", ["a"] * 11), Task.CLASSIFICATION)
