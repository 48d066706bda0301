"""Methodology checks: leakage of test rows into train, leaky features
detected through predictive power, train/test PPS gaps and unused features.
"""

from __future__ import annotations

from tabcheck.adapter import permutation_importance
from tabcheck.checks._common import feature_row_keys, preview_cells
from tabcheck.framework import (
    Category,
    Check,
    CheckContext,
    CheckSkip,
    Condition,
    ConditionStatus,
    Param,
    bar_series,
    table,
)
from tabcheck.kernels import pps

PASS = ConditionStatus.PASS
FAIL = ConditionStatus.FAIL
WARNING = ConditionStatus.WARNING


class TrainTestLeakageCheck(Check):
    check_id = "train_test_leakage"
    category = Category.METHODOLOGY
    param_specs = {"max_leak_fraction": Param(0.0, "fraction")}
    headline_desc = "fraction of test rows found in train"

    def run(self, ctx: CheckContext):
        train = ctx.require_train()
        test = ctx.require_test()
        shared = [f for f in train.feature_names if f in set(test.feature_names)]
        if not shared:
            raise CheckSkip("requires shared features between train and test")
        train_keys = set(feature_row_keys(train, shared))
        test_keys = feature_row_keys(test, shared)
        leaked = [i for i, k in enumerate(test_keys) if k in train_keys]
        fraction = len(leaked) / len(test_keys) if test_keys else 0.0
        displays = []
        if leaked:
            rows = [[i] + preview_cells(test_keys[i]) for i in leaked[:5]]
            header = ["test row"] + shared[:6] + (["..."] if len(shared) > 6 else [])
            displays.append(table("Test rows found in train", header, rows))
        return fraction, displays

    def default_conditions(self):
        limit = self.params["max_leak_fraction"]

        def predicate(value):
            detail = f"{value:.2%} of test rows also appear in train"
            return (FAIL, detail) if value > limit else (PASS, detail)

        return [Condition("No test rows present in train", predicate)]

    def headline(self, value):
        return float(value)


class FeatureLabelCorrelationCheck(Check):
    check_id = "feature_label_correlation"
    category = Category.METHODOLOGY
    param_specs = {"max_pps": Param(0.8, "fraction")}
    headline_desc = "largest per-feature predictive power"

    def run(self, ctx: CheckContext):
        ds = ctx.require_labeled("train")
        value = {}
        notes = []
        for name in ds.feature_names:
            result = pps(ds.column(name), ds.label, ds.task)
            value[name] = result.value
            if result.note:
                notes.append(f"{name}: {result.note}")
        ordered = sorted(value, key=lambda f: (-value[f], f))
        displays = [bar_series(
            "Predictive power per feature",
            ordered,
            [{"name": "pps", "values": [value[f] for f in ordered]}],
        )]
        message = "; ".join(notes) if notes else None
        return value, displays, message

    def default_conditions(self):
        limit = self.params["max_pps"]

        def predicate(value):
            leaky = sorted(f for f, v in value.items() if v > limit)
            if leaky:
                return FAIL, "suspiciously predictive feature(s): " + ", ".join(
                    f"{f} (pps {value[f]:.3g})" for f in leaky
                )
            top = max(value.values()) if value else 0.0
            return PASS, f"all feature PPS within {limit:g} (max {top:.3g})"

        return [Condition(f"Per-feature PPS not greater than {limit:g}", predicate)]

    def headline(self, value):
        return max(value.values()) if value else 0.0


class PpsDifferenceCheck(Check):
    check_id = "pps_difference"
    category = Category.METHODOLOGY
    param_specs = {"max_difference": Param(0.2, "fraction")}
    headline_desc = "largest train-test PPS difference"

    def run(self, ctx: CheckContext):
        train = ctx.require_labeled("train")
        test = ctx.require_labeled("test")
        shared = [f for f in train.feature_names if f in set(test.feature_names)]
        if not shared:
            raise CheckSkip("requires shared features between train and test")
        value = {}
        rows = []
        for name in shared:
            p_train = pps(train.column(name), train.label, train.task).value
            p_test = pps(test.column(name), test.label, test.task).value
            value[name] = p_train - p_test
            rows.append([name, p_train, p_test, p_train - p_test])
        rows.sort(key=lambda r: (-r[3], r[0]))
        displays = [table("Predictive power: train vs test", ["feature", "pps train", "pps test", "difference"], rows)]
        return value, displays

    def default_conditions(self):
        limit = self.params["max_difference"]

        def predicate(value):
            gapped = sorted(f for f, v in value.items() if v > limit)
            if gapped:
                return FAIL, "feature(s) predictive in train but not in test: " + ", ".join(
                    f"{f} (difference {value[f]:.3g})" for f in gapped
                )
            top = max(value.values()) if value else 0.0
            return PASS, f"all PPS differences within {limit:g} (max {top:.3g})"

        return [Condition(f"Train-test PPS difference not greater than {limit:g}", predicate)]

    def headline(self, value):
        return max(value.values()) if value else 0.0


class UnusedFeaturesCheck(Check):
    check_id = "unused_features"
    category = Category.METHODOLOGY
    param_specs = {
        "importance_share_min": Param(0.02, "fraction"),
        "repeats": Param(5, "count"),
    }
    headline_desc = "number of unused features"

    def run(self, ctx: CheckContext):
        adapter = ctx.require_adapter()
        split = ctx.eval_split()
        ds = ctx.require_labeled(split)
        baseline = None
        try:
            baseline = ctx.predictions_for(split)
        except CheckSkip:
            pass
        report = permutation_importance(
            adapter, ds, baseline=baseline, repeats=int(self.params["repeats"]), seed=ctx.seed
        )
        threshold = self.params["importance_share_min"]
        unused = [
            name
            for name in ds.feature_names
            if report.normalized[name] < threshold and ds.column(name).distinct_count() > 1
        ]
        ordered = sorted(report.normalized, key=lambda f: (-report.normalized[f], f))
        displays = [
            bar_series(
                f"Permutation importance ({report.metric_name}, {report.repeats} repeats)",
                ordered,
                [{"name": "share", "values": [report.normalized[f] for f in ordered]}],
            ),
            table(
                "Raw metric drops",
                ["feature", "raw drop", "normalized share"],
                [[f, report.raw_drop[f], report.normalized[f]] for f in ordered],
            ),
        ]
        return unused, displays

    def default_conditions(self):
        def predicate(value):
            if value:
                return WARNING, f"feature(s) nearly unused by the model: {', '.join(value)}"
            return PASS, "every feature contributes to the model"

        return [Condition("No unused features", predicate)]

    def headline(self, value):
        return float(len(value))
