"""Distribution checks: per-feature drift, label drift and trust scores.

Numeric columns are compared with the normalized Earth Mover's Distance,
categorical columns with the Population Stability Index over the union of
categories.
"""

from __future__ import annotations

import numpy as np

from tabcheck.checks._common import (
    categorical_pair_histogram,
    numeric_pair_histogram,
    proportions_over,
)
from tabcheck.dataset import ColumnType, Dataset, Task
from tabcheck.framework import (
    Category,
    Check,
    CheckContext,
    CheckSkip,
    Condition,
    ConditionStatus,
    Param,
    histogram_pair,
    table,
)
from tabcheck.kernels import Histogram, TrustParams, emd_normalized, psi, quantile_bins, trust_scores

PASS = ConditionStatus.PASS
FAIL = ConditionStatus.FAIL
WARNING = ConditionStatus.WARNING


def _drift_for_columns(train_col, test_col):
    """(method, score) for one shared column, or a skip reason string."""
    a_type, b_type = train_col.ctype, test_col.ctype
    if a_type is ColumnType.MIXED or b_type is ColumnType.MIXED:
        return "mixed-type column"
    if a_type is not b_type:
        return f"type mismatch ({a_type.value} vs {b_type.value})"
    if a_type is ColumnType.NUMERIC:
        a = train_col.numeric[~np.isnan(train_col.numeric)]
        b = test_col.numeric[~np.isnan(test_col.numeric)]
        if a.size == 0 or b.size == 0:
            return "no non-missing values"
        return ("EMD", emd_normalized(a, b).value)
    a = train_col.non_missing()
    b = test_col.non_missing()
    if not a or not b:
        return "no non-missing values"
    categories = sorted(set(a) | set(b))
    p = Histogram(tuple(categories), tuple(proportions_over(a, categories)))
    q = Histogram(tuple(categories), tuple(proportions_over(b, categories)))
    return ("PSI", psi(p, q).value)


def _drift_condition(name: str, emd_threshold: float, psi_threshold: float, single: bool = False):
    def predicate(value):
        entries = {"label": value} if single else value["features"]
        failing = []
        for key, rec in entries.items():
            limit = emd_threshold if rec["method"] == "EMD" else psi_threshold
            if rec["score"] > limit:
                failing.append(f"{key} ({rec['method']} {rec['score']:.3g} > {limit:g})")
        if failing:
            return FAIL, "drift above threshold: " + ", ".join(sorted(failing))
        if not single and value["skipped"]:
            return WARNING, "feature(s) skipped: " + ", ".join(
                f"{k} ({v})" for k, v in sorted(value["skipped"].items())
            )
        scores = [rec["score"] for rec in entries.values()]
        top = max(scores) if scores else 0.0
        return PASS, f"all drift scores within thresholds (max {top:.3g})"

    return [Condition(name, predicate)]


class FeatureDriftCheck(Check):
    check_id = "feature_drift"
    category = Category.DISTRIBUTION
    param_specs = {
        "emd_threshold": Param(0.1, "fraction"),
        "psi_threshold": Param(0.2, "positive"),
    }
    headline_desc = "largest per-feature drift score"

    def run(self, ctx: CheckContext):
        train = ctx.require_train()
        test = ctx.require_test()
        shared = [f for f in train.feature_names if f in set(test.feature_names)]
        if not shared:
            raise CheckSkip("requires shared features between train and test")
        features = {}
        skipped = {}
        displays_with_scores = []
        for name in shared:
            outcome = _drift_for_columns(train.column(name), test.column(name))
            if isinstance(outcome, str):
                skipped[name] = outcome
                continue
            method, score = outcome
            features[name] = {"method": method, "score": score}
            note = f"{method} = {score:.4g}"
            if method == "EMD":
                a = train.column(name).numeric
                b = test.column(name).numeric
                item = numeric_pair_histogram(name, note, a[~np.isnan(a)], b[~np.isnan(b)])
            else:
                item = categorical_pair_histogram(
                    name, note, train.column(name).non_missing(), test.column(name).non_missing()
                )
            displays_with_scores.append((score, name, item))
        # Highest drift first, mirroring the usual report layout.
        displays_with_scores.sort(key=lambda t: (-t[0], t[1]))
        displays = [item for _, _, item in displays_with_scores]
        return {"features": features, "skipped": skipped}, displays

    def default_conditions(self):
        return _drift_condition(
            f"Per-feature drift within thresholds (EMD {self.params['emd_threshold']:g}, "
            f"PSI {self.params['psi_threshold']:g})",
            self.params["emd_threshold"],
            self.params["psi_threshold"],
        )

    def headline(self, value):
        scores = [rec["score"] for rec in value["features"].values()]
        return max(scores) if scores else 0.0


class LabelDriftCheck(Check):
    check_id = "label_drift"
    category = Category.DISTRIBUTION
    param_specs = {
        "emd_threshold": Param(0.1, "fraction"),
        "psi_threshold": Param(0.2, "positive"),
    }
    headline_desc = "label drift score"

    def run(self, ctx: CheckContext):
        train = ctx.require_labeled("train")
        test = ctx.require_labeled("test")
        if train.task is not test.task:
            raise CheckSkip(f"train task is {train.task.value} but test task is {test.task.value}")
        a_col, b_col = train.label, test.label
        if train.task is Task.REGRESSION:
            a = a_col.numeric[~np.isnan(a_col.numeric)]
            b = b_col.numeric[~np.isnan(b_col.numeric)]
            if a.size == 0 or b.size == 0:
                raise CheckSkip("label column has no non-missing values")
            score = emd_normalized(a, b).value
            value = {"method": "EMD", "score": score}
            display = numeric_pair_histogram(a_col.name, f"EMD = {score:.4g}", a, b)
        else:
            a = a_col.non_missing()
            b = b_col.non_missing()
            if not a or not b:
                raise CheckSkip("label column has no non-missing values")
            categories = sorted(set(a) | set(b))
            score = psi(
                Histogram(tuple(categories), tuple(proportions_over(a, categories))),
                Histogram(tuple(categories), tuple(proportions_over(b, categories))),
            ).value
            value = {"method": "PSI", "score": score}
            display = categorical_pair_histogram(a_col.name, f"PSI = {score:.4g}", a, b)
        return value, [display]

    def default_conditions(self):
        return _drift_condition(
            f"Label drift within thresholds (EMD {self.params['emd_threshold']:g}, "
            f"PSI {self.params['psi_threshold']:g})",
            self.params["emd_threshold"],
            self.params["psi_threshold"],
            single=True,
        )

    def headline(self, value):
        return float(value["score"])


def _numeric_matrix(ds: Dataset, names):
    """Rows complete across the given numeric features, plus kept row indices."""
    cols = [ds.column(n).numeric for n in names]
    mat = np.column_stack(cols)
    keep = ~np.isnan(mat).any(axis=1)
    return mat[keep], np.where(keep)[0]


class TrustScoreCheck(Check):
    check_id = "trust_score"
    category = Category.DISTRIBUTION
    param_specs = {
        "min_ratio": Param(0.8, "positive"),
        "k": Param(2, "count"),
        "alpha": Param(0.0, "fraction"),
    }
    headline_desc = "test/train trust score ratio"

    def run(self, ctx: CheckContext):
        train = ctx.require_labeled("train")
        test = ctx.require_test()
        if train.task is not Task.CLASSIFICATION:
            raise CheckSkip("requires classification task")
        shared = [f for f in train.feature_names if f in set(test.feature_names)]
        numeric = [
            f for f in shared
            if train.column(f).ctype is ColumnType.NUMERIC and test.column(f).ctype is ColumnType.NUMERIC
        ]
        if len(numeric) < 2:
            raise CheckSkip("requires at least 2 numeric features")
        preds_train = ctx.predictions_for("train")
        preds_test = ctx.predictions_for("test")

        train_mat, train_rows = _numeric_matrix(train, numeric)
        test_mat, test_rows = _numeric_matrix(test, numeric)
        label_cells = train.label.values
        ref_keep = [i for i in range(len(train_rows)) if label_cells[train_rows[i]] is not None]
        if not ref_keep:
            raise CheckSkip("no complete labeled train rows for trust scores")
        ref_mat = train_mat[ref_keep]
        ref_labels = [label_cells[train_rows[i]] for i in ref_keep]
        if len(set(ref_labels)) < 2:
            raise CheckSkip("requires at least 2 classes in the train labels")
        if test_mat.shape[0] == 0:
            raise CheckSkip("no complete test rows for trust scores")

        params = TrustParams(k=int(self.params["k"]), alpha=self.params["alpha"])
        try:
            scores_train = trust_scores(
                ref_mat, ref_labels, ref_mat,
                [preds_train.predicted[train_rows[i]] for i in ref_keep], params,
            )
            scores_test = trust_scores(
                ref_mat, ref_labels, test_mat,
                [preds_test.predicted[i] for i in test_rows], params,
            )
        except ValueError as exc:
            raise CheckSkip(str(exc)) from exc

        mean_train = float(np.mean(scores_train))
        mean_test = float(np.mean(scores_test))
        if mean_train == 0.0:
            ratio = 1.0 if mean_test == 0.0 else float("inf")
        else:
            ratio = mean_test / mean_train
        value = {"mean_train": mean_train, "mean_test": mean_test, "ratio": ratio}

        displays = [
            table(
                "Trust score summary",
                ["split", "rows", "mean", "median", "min", "max"],
                [
                    ["train", len(scores_train), mean_train, float(np.median(scores_train)),
                     float(scores_train.min()), float(scores_train.max())],
                    ["test", len(scores_test), mean_test, float(np.median(scores_test)),
                     float(scores_test.min()), float(scores_test.max())],
                ],
            ),
            _trust_histogram(scores_train, scores_test),
        ]
        return value, displays

    def default_conditions(self):
        limit = self.params["min_ratio"]

        def predicate(value):
            ratio = value["ratio"]
            detail = f"test/train mean trust ratio is {ratio:.3g}"
            return (FAIL, detail) if ratio < limit else (PASS, detail)

        return [Condition(f"Trust score ratio not less than {limit:g}", predicate)]

    def headline(self, value):
        return float(value["ratio"])


def _trust_histogram(scores_train: np.ndarray, scores_test: np.ndarray):
    """Distribution of per-row trust scores, clipped for display."""
    cap = 10.0
    a = np.minimum(scores_train, cap)
    b = np.minimum(scores_test, cap)
    edges = quantile_bins(np.concatenate([a, b]), 8)
    labels = []
    bounds = [-np.inf] + edges + [np.inf]
    for i in range(len(bounds) - 1):
        lo = "min" if i == 0 else f"{bounds[i]:.3g}"
        hi = "max" if i == len(bounds) - 2 else f"{bounds[i + 1]:.3g}"
        labels.append(f"[{lo}, {hi})")
    counts_a = np.histogram(a, bins=np.array([-np.inf] + edges + [np.inf]))[0]
    counts_b = np.histogram(b, bins=np.array([-np.inf] + edges + [np.inf]))[0]
    return histogram_pair(
        "Trust score distribution (clipped at 10)",
        labels,
        {"name": "train", "values": [float(x) / max(a.size, 1) for x in counts_a]},
        {"name": "test", "values": [float(x) / max(b.size, 1) for x in counts_b]},
    )
