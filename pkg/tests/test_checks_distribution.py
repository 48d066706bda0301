"""Drift and trust-score checks on constructed and Monte Carlo cases."""

from __future__ import annotations

import numpy as np
import pytest

from tabcheck.adapter import Predictions
from tabcheck.checks import FeatureDriftCheck, LabelDriftCheck, TrustScoreCheck
from tabcheck.dataset import Task
from tabcheck.framework import (
    CheckContext,
    CheckStatus,
    ConditionStatus,
    DisplayKind,
    evaluate_conditions,
    run_check,
)

from conftest import make_dataset


def _run(check, ctx):
    result = run_check(check, ctx)
    conditions = evaluate_conditions(result, check.default_conditions())
    return result, conditions


def _num(values):
    return [f"{v:.6f}" for v in values]


class TestFeatureDrift:
    def test_identical_split_passes_with_zero_scores(self):
        rng = np.random.RandomState(0)
        cols = {"x": _num(rng.normal(size=300)), "c": list(rng.choice(["r", "g"], size=300))}
        ctx = CheckContext(train=make_dataset(cols), test=make_dataset(dict(cols)))
        result, (cond,) = _run(FeatureDriftCheck(), ctx)
        assert result.status is CheckStatus.RAN
        assert result.value["features"]["x"]["score"] == 0.0
        assert result.value["features"]["c"]["score"] == 0.0
        assert cond.status is ConditionStatus.PASS

    def test_two_sigma_shift_fails_emd_threshold(self):
        rng = np.random.RandomState(7)
        base = rng.normal(size=1000)
        shifted = rng.normal(loc=2.0, size=1000)
        ctx = CheckContext(
            train=make_dataset({"x": _num(base)}),
            test=make_dataset({"x": _num(shifted)}),
        )
        result, (cond,) = _run(FeatureDriftCheck(), ctx)
        assert result.value["features"]["x"]["method"] == "EMD"
        assert result.value["features"]["x"]["score"] > 0.1
        assert cond.status is ConditionStatus.FAIL

    def test_category_shift_fails_psi_threshold(self):
        train = make_dataset({"c": ["a"] * 50 + ["b"] * 50})
        test = make_dataset({"c": ["a"] * 90 + ["b"] * 10})
        ctx = CheckContext(train=train, test=test)
        result, (cond,) = _run(FeatureDriftCheck(), ctx)
        rec = result.value["features"]["c"]
        assert rec["method"] == "PSI"
        assert rec["score"] == pytest.approx(0.8788898309344878, abs=1e-9)
        assert cond.status is ConditionStatus.FAIL

    def test_mixed_column_skipped_with_warning(self):
        rng = np.random.RandomState(3)
        ok = _num(rng.normal(size=100))
        mixed = [str(i) for i in range(99)] + ["oops"]
        ctx = CheckContext(
            train=make_dataset({"m": mixed, "x": ok}),
            test=make_dataset({"m": list(mixed), "x": list(ok)}),
        )
        result, (cond,) = _run(FeatureDriftCheck(), ctx)
        assert "m" in result.value["skipped"]
        assert cond.status is ConditionStatus.WARNING

    def test_histogram_pair_displays_sorted_by_score(self):
        rng = np.random.RandomState(5)
        quiet = rng.normal(size=400)
        loud_train = rng.normal(size=400)
        loud_test = rng.normal(loc=3.0, size=400)
        ctx = CheckContext(
            train=make_dataset({"quiet": _num(quiet), "loud": _num(loud_train)}),
            test=make_dataset({"quiet": _num(quiet), "loud": _num(loud_test)}),
        )
        result, _ = _run(FeatureDriftCheck(), ctx)
        assert [d.kind for d in result.displays] == [DisplayKind.HISTOGRAM_PAIR] * 2
        assert result.displays[0].payload["title"] == "loud"

    def test_row_order_invariance(self):
        rng = np.random.RandomState(9)
        vals = _num(rng.normal(size=200))
        perm = rng.permutation(200)
        ctx_a = CheckContext(train=make_dataset({"x": vals}), test=make_dataset({"x": vals}))
        ctx_b = CheckContext(
            train=make_dataset({"x": [vals[i] for i in perm]}),
            test=make_dataset({"x": vals}),
        )
        a, _ = _run(FeatureDriftCheck(), ctx_a)
        b, _ = _run(FeatureDriftCheck(), ctx_b)
        assert a.value["features"]["x"]["score"] == b.value["features"]["x"]["score"]


class TestLabelDrift:
    def test_identical_labels_pass(self):
        cols = {"f": [str(i) for i in range(100)], "y": ["a", "b"] * 50}
        ctx = CheckContext(train=make_dataset(cols, label="y"), test=make_dataset(dict(cols), label="y"))
        result, (cond,) = _run(LabelDriftCheck(), ctx)
        assert result.value == {"method": "PSI", "score": 0.0}
        assert cond.status is ConditionStatus.PASS

    def test_class_balance_shift_fails(self):
        train = make_dataset({"f": [str(i) for i in range(100)], "y": ["a"] * 50 + ["b"] * 50}, label="y")
        test = make_dataset({"f": [str(i) for i in range(100)], "y": ["a"] * 90 + ["b"] * 10}, label="y")
        ctx = CheckContext(train=train, test=test)
        result, (cond,) = _run(LabelDriftCheck(), ctx)
        assert result.value["score"] == pytest.approx(0.8788898309344878, abs=1e-9)
        assert cond.status is ConditionStatus.FAIL

    def test_regression_label_shift_fails(self):
        rng = np.random.RandomState(1)
        base = rng.uniform(size=500)
        train = make_dataset({"f": _num(rng.normal(size=500)), "y": _num(base)}, label="y")
        test = make_dataset({"f": _num(rng.normal(size=500)), "y": _num(base + 1.0)}, label="y")
        ctx = CheckContext(train=train, test=test)
        result, (cond,) = _run(LabelDriftCheck(), ctx)
        assert result.value["method"] == "EMD"
        assert result.value["score"] > 0.1
        assert cond.status is ConditionStatus.FAIL

    def test_unlabeled_test_skips(self):
        train = make_dataset({"f": ["1"] * 30, "y": ["a", "b"] * 15}, label="y")
        test = make_dataset({"f": ["1"] * 30})
        result = run_check(LabelDriftCheck(), CheckContext(train=train, test=test))
        assert result.status is CheckStatus.SKIPPED
        assert result.message == "requires labeled test dataset"


def _gaussian_ctx(rng, flip_test=False, n=120):
    a = rng.normal(loc=(0, 0), scale=0.5, size=(n, 2))
    b = rng.normal(loc=(4, 4), scale=0.5, size=(n, 2))
    labels = ["a"] * n + ["b"] * n
    points = np.vstack([a, b])

    def dataset():
        return make_dataset(
            {
                "x1": _num(points[:, 0]),
                "x2": _num(points[:, 1]),
                "y": list(labels),
            },
            label="y",
        )

    train, test = dataset(), dataset()
    correct = tuple(labels)
    flipped = tuple("b" if v == "a" else "a" for v in labels)
    preds_train = Predictions(task=Task.CLASSIFICATION, predicted=correct, classes=("a", "b"))
    preds_test = Predictions(
        task=Task.CLASSIFICATION,
        predicted=flipped if flip_test else correct,
        classes=("a", "b"),
    )
    return CheckContext(train=train, test=test, predictions_train=preds_train, predictions_test=preds_test)


class TestTrustScore:
    def test_test_copy_of_train_ratio_one(self):
        ctx = _gaussian_ctx(np.random.RandomState(12))
        result, (cond,) = _run(TrustScoreCheck(), ctx)
        assert result.status is CheckStatus.RAN
        assert result.value["ratio"] == pytest.approx(1.0)
        assert cond.status is ConditionStatus.PASS

    def test_flipped_test_predictions_fail(self):
        ctx = _gaussian_ctx(np.random.RandomState(12), flip_test=True)
        result, (cond,) = _run(TrustScoreCheck(), ctx)
        assert result.value["ratio"] < 0.8
        assert cond.status is ConditionStatus.FAIL

    def test_single_numeric_feature_skips(self):
        cols = {"x1": _num(np.arange(30)), "c": ["u", "v"] * 15, "y": ["a", "b"] * 15}
        train = make_dataset(cols, label="y")
        test = make_dataset({k: list(v) for k, v in cols.items()}, label="y")
        preds = Predictions(task=Task.CLASSIFICATION, predicted=("a", "b") * 15, classes=("a", "b"))
        ctx = CheckContext(train=train, test=test, predictions_train=preds, predictions_test=preds)
        result = run_check(TrustScoreCheck(), ctx)
        assert result.status is CheckStatus.SKIPPED
        assert result.message == "requires at least 2 numeric features"

    def test_regression_task_skips(self):
        rng = np.random.RandomState(3)
        cols = {"x1": _num(rng.normal(size=40)), "x2": _num(rng.normal(size=40)), "y": _num(rng.normal(size=40))}
        train = make_dataset(cols, label="y")
        test = make_dataset({k: list(v) for k, v in cols.items()}, label="y")
        preds = Predictions(task=Task.REGRESSION, predicted=tuple(float(i) for i in range(40)))
        ctx = CheckContext(train=train, test=test, predictions_train=preds, predictions_test=preds)
        result = run_check(TrustScoreCheck(), ctx)
        assert result.status is CheckStatus.SKIPPED
        assert "classification" in result.message

    def test_missing_predictions_skip(self):
        ctx = _gaussian_ctx(np.random.RandomState(12))
        bare = CheckContext(train=ctx.train, test=ctx.test)
        result = run_check(TrustScoreCheck(), bare)
        assert result.status is CheckStatus.SKIPPED
        assert "predictions" in result.message
