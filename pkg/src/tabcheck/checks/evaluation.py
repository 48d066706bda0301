"""Model evaluation checks: performance metrics, a simple-model baseline,
probability calibration, error distribution and weak data segments.

These checks score the test split when one is present, otherwise train.
Rows with a missing label are excluded from scoring.
"""

from __future__ import annotations

import numpy as np

from tabcheck.dataset import ColumnType, Dataset, Task
from tabcheck.framework import (
    Category,
    Check,
    CheckContext,
    CheckSkip,
    Condition,
    ConditionStatus,
    Param,
    bar_series,
    line_series,
    table,
)
from tabcheck.kernels import (
    Feature,
    TreeParams,
    bin_index,
    bin_label,
    brier_score,
    calibration_bins,
    compute_metrics,
    fit_tree,
    predict_tree,
    quantile_bins,
)

PASS = ConditionStatus.PASS
FAIL = ConditionStatus.FAIL
WARNING = ConditionStatus.WARNING


def _scored_rows(ds: Dataset, preds) -> tuple:
    """(row indices, labels, predictions) for rows with a present label."""
    if preds.n_rows != ds.n_rows:
        raise ValueError(f"predictions have {preds.n_rows} rows, dataset has {ds.n_rows}")
    label = ds.label
    idx = [i for i in range(ds.n_rows) if label.values[i] is not None]
    if not idx:
        raise CheckSkip("label column has no non-missing values")
    if ds.task is Task.REGRESSION:
        truth = [float(label.numeric[i]) for i in idx]
    else:
        truth = [label.values[i] for i in idx]
    guesses = [preds.predicted[i] for i in idx]
    return idx, truth, guesses


class PerformanceReportCheck(Check):
    check_id = "performance_report"
    category = Category.EVALUATION
    param_specs = {
        "min_accuracy": Param(None, "optional_fraction"),
        "min_macro_f1": Param(None, "optional_fraction"),
        "min_r2": Param(None, "optional_number"),
        "max_rmse": Param(None, "optional_number"),
        "max_mae": Param(None, "optional_number"),
    }

    def run(self, ctx: CheckContext):
        split = ctx.eval_split()
        ds = ctx.require_labeled(split)
        preds = ctx.predictions_for(split)
        _, truth, guesses = _scored_rows(ds, preds)
        metrics = compute_metrics(ds.task, truth, guesses, classes=preds.classes)
        value = metrics.as_dict()
        displays = []
        if ds.task is Task.CLASSIFICATION:
            classes = sorted(metrics.per_class)
            displays.append(table(
                "Per-class metrics",
                ["class", "precision", "recall", "f1", "support"],
                [[c] + [metrics.per_class[c][k] for k in ("precision", "recall", "f1", "support")] for c in classes],
            ))
            confusion = {(t, p): 0 for t in classes for p in classes}
            for t, p in zip(truth, guesses):
                confusion[(t, p)] = confusion.get((t, p), 0) + 1
            displays.append(table(
                "Confusion matrix (rows = actual)",
                ["actual \\ predicted"] + classes,
                [[t] + [confusion.get((t, p), 0) for p in classes] for t in classes],
            ))
        else:
            displays.append(table(
                "Regression metrics",
                ["metric", "value"],
                [["rmse", value["rmse"]], ["mae", value["mae"]], ["r2", value["r2"]]],
            ))
        return value, displays

    def default_conditions(self):
        conditions = []
        bounds = [
            ("min_accuracy", "accuracy", "not less than", lambda v, t: v >= t),
            ("min_macro_f1", "macro_f1", "not less than", lambda v, t: v >= t),
            ("min_r2", "r2", "not less than", lambda v, t: v >= t),
            ("max_rmse", "rmse", "not greater than", lambda v, t: v <= t),
            ("max_mae", "mae", "not greater than", lambda v, t: v <= t),
        ]
        for param, key, phrase, ok in bounds:
            threshold = self.params[param]
            if threshold is None:
                continue

            def predicate(value, key=key, threshold=threshold, ok=ok, phrase=phrase):
                if key not in value or value[key] is None:
                    return WARNING, f"metric '{key}' not available for this task"
                detail = f"{key} is {value[key]:.4g} (required {phrase} {threshold:g})"
                return (PASS, detail) if ok(value[key], threshold) else (FAIL, detail)

            conditions.append(Condition(f"Metric {key} {phrase} {threshold:g}", predicate))
        return conditions


class SimpleModelComparisonCheck(Check):
    check_id = "simple_model_comparison"
    category = Category.EVALUATION
    param_specs = {
        "tree_depth": Param(3, "count"),
        "min_gain": Param(0.0, "number"),
    }
    headline_desc = "gain of the model over the simple baseline"

    def run(self, ctx: CheckContext):
        train = ctx.require_labeled("train")
        test = ctx.require_labeled("test")
        preds = ctx.predictions_for("test")
        idx, truth, guesses = _scored_rows(test, preds)

        label = train.label
        train_idx = [i for i in range(train.n_rows) if label.values[i] is not None]
        if len(train_idx) < 2 * 5:
            raise CheckSkip("too few labeled train rows to fit the baseline tree")
        features = [Feature.from_column(train.column(n)) for n in train.feature_names]
        fit_features = [
            Feature(f.name, f.numeric, tuple(f.values[i] for i in train_idx)) for f in features
        ]
        if train.task is Task.REGRESSION:
            y = [float(label.numeric[i]) for i in train_idx]
        else:
            y = [label.values[i] for i in train_idx]
        tree = fit_tree(fit_features, y, train.task, TreeParams(max_depth=int(self.params["tree_depth"])))

        shared = set(test.feature_names)
        missing = [n for n in train.feature_names if n not in shared]
        if missing:
            raise CheckSkip("test dataset lacks feature(s) the baseline uses: " + ", ".join(missing))
        test_features = [Feature.from_column(test.column(n)) for n in train.feature_names]
        rows = [[f.values[i] for f in test_features] for i in idx]
        simple = predict_tree(tree, rows)

        epsilon = 1e-12
        if test.task is Task.CLASSIFICATION:
            metric_name = "accuracy"
            model_score = sum(1 for t, p in zip(truth, guesses) if t == p) / len(truth)
            simple_score = sum(1 for t, p in zip(truth, simple) if t == p) / len(truth)
            gain = (model_score - simple_score) / max(abs(simple_score), epsilon)
        else:
            metric_name = "rmse"
            model_score = float(np.sqrt(np.mean((np.asarray(truth) - np.asarray(guesses, dtype=float)) ** 2)))
            simple_score = float(np.sqrt(np.mean((np.asarray(truth) - np.asarray(simple, dtype=float)) ** 2)))
            gain = (simple_score - model_score) / max(simple_score, epsilon)

        value = {
            "metric": metric_name,
            "model_score": model_score,
            "simple_score": simple_score,
            "gain": gain,
        }
        displays = [table(
            f"Model vs simple tree baseline ({metric_name})",
            ["model", metric_name],
            [["candidate model", model_score], ["simple tree", simple_score]],
        )]
        message = "simple model degenerated to a constant baseline" if tree.is_degenerate else None
        return value, displays, message

    def default_conditions(self):
        limit = self.params["min_gain"]

        def predicate(value):
            detail = (
                f"model {value['metric']} {value['model_score']:.4g} vs simple {value['simple_score']:.4g} "
                f"(gain {value['gain']:.4g})"
            )
            return (FAIL, detail) if value["gain"] <= limit else (PASS, detail)

        return [Condition("Model outperforms the simple baseline", predicate)]

    def headline(self, value):
        return float(value["gain"])


class CalibrationCheck(Check):
    check_id = "calibration"
    category = Category.EVALUATION
    param_specs = {
        "brier_warn_threshold": Param(0.3, "positive"),
        "n_bins": Param(10, "count"),
    }
    headline_desc = "overall Brier score"

    def run(self, ctx: CheckContext):
        split = ctx.eval_split()
        ds = ctx.require_labeled(split)
        if ds.task is not Task.CLASSIFICATION:
            raise CheckSkip("requires classification task")
        preds = ctx.predictions_for(split)
        if preds.probabilities is None:
            raise CheckSkip("requires class probabilities")
        idx, truth, _ = _scored_rows(ds, preds)
        probs = np.asarray([preds.probabilities[i] for i in idx], dtype=float)
        classes = list(preds.classes)
        overall = brier_score(probs, truth, classes)

        per_class = {}
        curves = []
        for j, c in enumerate(classes):
            is_c = np.array([t == c for t in truth])
            p_c = probs[:, j]
            per_class[c] = float(np.mean((p_c - is_c.astype(float)) ** 2))
            points = calibration_bins(p_c, is_c, n_bins=int(self.params["n_bins"]))
            curves.append({
                "name": c,
                "x": [p[0] for p in points],
                "y": [p[1] for p in points],
            })
        displays = [
            line_series("Calibration curves (predicted vs observed)", curves),
            table("Brier score per class", ["class", "brier"], [[c, per_class[c]] for c in classes]),
        ]
        return {"per_class": per_class, "overall": overall}, displays

    def default_conditions(self):
        limit = self.params["brier_warn_threshold"]

        def predicate(value):
            detail = f"overall Brier score is {value['overall']:.4g}"
            return (WARNING, detail) if value["overall"] > limit else (PASS, detail)

        return [Condition(f"Overall Brier score not greater than {limit:g}", predicate)]

    def headline(self, value):
        return float(value["overall"])


class ErrorDistributionCheck(Check):
    check_id = "error_distribution"
    category = Category.EVALUATION
    param_specs = {"skew_warn_threshold": Param(1.0, "positive")}
    headline_desc = "residual skewness (regression)"

    def run(self, ctx: CheckContext):
        split = ctx.eval_split()
        ds = ctx.require_labeled(split)
        preds = ctx.predictions_for(split)
        idx, truth, guesses = _scored_rows(ds, preds)
        if ds.task is Task.REGRESSION:
            residuals = np.asarray(truth) - np.asarray(guesses, dtype=float)
            mean = float(np.mean(residuals))
            std = float(np.std(residuals))
            skew = 0.0 if std == 0 else float(np.mean((residuals - mean) ** 3) / std**3)
            value = {"mean": mean, "std": std, "skewness": skew}
            edges = np.linspace(residuals.min(), residuals.max(), 11) if std > 0 else None
            if edges is None:
                labels, props = [f"{mean:.4g}"], [1.0]
            else:
                counts, _ = np.histogram(residuals, bins=edges)
                labels = [f"[{edges[i]:.3g}, {edges[i+1]:.3g})" for i in range(10)]
                props = [float(c) / residuals.size for c in counts]
            displays = [bar_series("Residual distribution", labels, [{"name": "residuals", "values": props}])]
            return value, displays
        classes = sorted(set(truth))
        per_class = {}
        for c in classes:
            rows = [(t, p) for t, p in zip(truth, guesses) if t == c]
            per_class[c] = sum(1 for t, p in rows if t != p) / len(rows)
        value = {"per_class_error": per_class}
        displays = [bar_series(
            "Error rate per class",
            classes,
            [{"name": "error rate", "values": [per_class[c] for c in classes]}],
        )]
        return value, displays

    def default_conditions(self):
        limit = self.params["skew_warn_threshold"]

        def predicate(value):
            if "skewness" not in value:
                worst = max(value["per_class_error"].values()) if value["per_class_error"] else 0.0
                return PASS, f"classification task: worst per-class error rate {worst:.2%}"
            skew = value["skewness"]
            detail = f"residual skewness is {skew:.3g}"
            return (WARNING, detail) if abs(skew) > limit else (PASS, detail)

        return [Condition(f"Residual skewness within ±{limit:g}", predicate)]

    def headline(self, value):
        if "skewness" in value:
            return float(value["skewness"])
        return max(value["per_class_error"].values()) if value["per_class_error"] else 0.0


class WeakSegmentsCheck(Check):
    check_id = "weak_segments"
    category = Category.EVALUATION
    param_specs = {
        "n_bins": Param(5, "count"),
        "top_categories": Param(10, "count"),
        "min_segment_fraction": Param(0.05, "fraction"),
        "relative_margin": Param(0.2, "fraction"),
    }
    headline_desc = "number of weak segments"

    def run(self, ctx: CheckContext):
        split = ctx.eval_split()
        ds = ctx.require_labeled(split)
        preds = ctx.predictions_for(split)
        idx, truth, guesses = _scored_rows(ds, preds)

        if ds.task is Task.CLASSIFICATION:
            metric_name = "accuracy"
            overall = sum(1 for t, p in zip(truth, guesses) if t == p) / len(truth)
        else:
            metric_name = "mae"
            overall = float(np.mean(np.abs(np.asarray(truth) - np.asarray(guesses, dtype=float))))

        min_size = self.params["min_segment_fraction"] * ds.n_rows
        margin = self.params["relative_margin"]
        epsilon = 1e-12
        segments = []
        for name in ds.feature_names:
            col = ds.column(name)
            for descr, members in self._segments_for(col, idx):
                if len(members) < min_size or not members:
                    continue
                seg_truth = [truth[i] for i in members]
                seg_guess = [guesses[i] for i in members]
                if ds.task is Task.CLASSIFICATION:
                    seg_metric = sum(1 for t, p in zip(seg_truth, seg_guess) if t == p) / len(seg_truth)
                    weak = seg_metric < (1 - margin) * overall
                    badness = (overall - seg_metric) / max(overall, epsilon)
                else:
                    seg_metric = float(np.mean(np.abs(np.asarray(seg_truth) - np.asarray(seg_guess, dtype=float))))
                    weak = seg_metric > (1 + margin) * overall
                    badness = (seg_metric - overall) / max(overall, epsilon)
                if weak:
                    segments.append({
                        "feature": name,
                        "segment": descr,
                        "size": len(members),
                        "metric": seg_metric,
                        "overall": overall,
                        "metric_name": metric_name,
                        "_badness": badness,
                    })
        segments.sort(key=lambda s: (-s["_badness"], s["feature"], s["segment"]))
        for s in segments:
            del s["_badness"]
        displays = []
        if segments:
            displays.append(table(
                f"Weak segments ({metric_name}; overall {overall:.4g})",
                ["feature", "segment", "size", metric_name],
                [[s["feature"], s["segment"], s["size"], s["metric"]] for s in segments],
            ))
        return segments, displays

    def _segments_for(self, col, scored_idx):
        """Partition scored rows with a present feature value into segments."""
        if col.ctype is ColumnType.NUMERIC:
            pairs = [(pos, col.numeric[i]) for pos, i in enumerate(scored_idx) if not np.isnan(col.numeric[i])]
            if not pairs:
                return []
            values = np.array([v for _, v in pairs])
            edges = quantile_bins(values, int(self.params["n_bins"]))
            assignments = bin_index(values, edges)
            out = []
            for b in range(len(edges) + 1):
                members = [pairs[j][0] for j in range(len(pairs)) if assignments[j] == b]
                if members:
                    out.append((bin_label(edges, b), members))
            return out
        top = int(self.params["top_categories"])
        counts: dict = {}
        members_by_cat: dict = {}
        for pos, i in enumerate(scored_idx):
            v = col.values[i]
            if v is None:
                continue
            counts[v] = counts.get(v, 0) + 1
            members_by_cat.setdefault(v, []).append(pos)
        if not counts:
            return []
        keep = sorted(counts, key=lambda c: (-counts[c], c))[:top]
        out = [(cat, members_by_cat[cat]) for cat in sorted(keep)]
        rest = [c for c in counts if c not in set(keep)]
        if rest:
            other = []
            for c in rest:
                other.extend(members_by_cat[c])
            out.append(("Other", sorted(other)))
        return out

    def default_conditions(self):
        def predicate(value):
            if value:
                worst = value[0]
                return WARNING, (
                    f"found {len(value)} weak segment(s); worst: {worst['feature']} = {worst['segment']} "
                    f"({worst['metric_name']} {worst['metric']:.4g} vs overall {worst['overall']:.4g})"
                )
            return PASS, "no sufficiently large underperforming segments"

        return [Condition("No weak segments", predicate)]

    def headline(self, value):
        return float(len(value))
