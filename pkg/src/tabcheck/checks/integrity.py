"""Data integrity checks: constants, duplicates, mixed types, outliers,
conflicting labels and train/test schema agreement.

Integrity checks run on the primary (train) dataset.
"""

from __future__ import annotations

import numpy as np

from tabcheck.checks._common import feature_row_keys, preview_cells
from tabcheck.dataset import ColumnType, validate_shared_schema
from tabcheck.framework import (
    Category,
    Check,
    CheckContext,
    Condition,
    ConditionStatus,
    Param,
    table,
)

PASS = ConditionStatus.PASS
FAIL = ConditionStatus.FAIL
WARNING = ConditionStatus.WARNING


class SingleValueCheck(Check):
    check_id = "single_value"
    category = Category.INTEGRITY
    headline_desc = "number of single-value columns"

    def run(self, ctx: CheckContext):
        ds = ctx.require_train()
        constant = []
        all_missing = []
        rows = []
        for col in ds.columns:
            distinct = set(col.non_missing())
            if not distinct:
                all_missing.append(col.name)
            elif len(distinct) == 1:
                constant.append(col.name)
                rows.append([col.name, next(iter(distinct))])
        displays = [table("Single-value columns", ["column", "value"], rows)] if rows else []
        message = None
        if all_missing:
            message = "all-missing column(s) excluded: " + ", ".join(all_missing)
        return constant, displays, message

    def default_conditions(self):
        def predicate(value):
            if value:
                return FAIL, f"found {len(value)} single-value column(s): {', '.join(value)}"
            return PASS, "no single-value columns"

        return [Condition("No single-value columns", predicate)]

    def headline(self, value):
        return float(len(value))


class DuplicatesCheck(Check):
    check_id = "duplicates"
    category = Category.INTEGRITY
    param_specs = {"max_duplicate_fraction": Param(0.05, "fraction")}
    headline_desc = "duplicate row fraction"

    def run(self, ctx: CheckContext):
        ds = ctx.require_train()
        keys = feature_row_keys(ds)
        counts: dict = {}
        for k in keys:
            counts[k] = counts.get(k, 0) + 1
        n = len(keys)
        fraction = (n - len(counts)) / n if n else 0.0
        groups = sorted(
            ((k, c) for k, c in counts.items() if c > 1),
            key=lambda kc: (-kc[1], str(kc[0])),
        )
        displays = []
        if groups:
            rows = [preview_cells(k) + [c] for k, c in groups[:5]]
            header = list(ds.feature_names[:6]) + (["..."] if len(ds.feature_names) > 6 else [])
            displays.append(table("Top duplicate groups", header + ["count"], rows))
        return fraction, displays

    def default_conditions(self):
        limit = self.params["max_duplicate_fraction"]

        def predicate(value):
            detail = f"found {value:.2%} duplicate samples"
            return (FAIL, detail) if value > limit else (PASS, detail)

        return [Condition(f"Duplicate fraction not greater than {limit:.0%}", predicate)]

    def headline(self, value):
        return float(value)


class MixedTypesCheck(Check):
    check_id = "mixed_types"
    category = Category.INTEGRITY
    param_specs = {
        "rare_fraction_max": Param(0.05, "fraction"),
        "warn_fraction_max": Param(0.2, "fraction"),
    }
    headline_desc = "largest minority-type fraction"

    def run(self, ctx: CheckContext):
        ds = ctx.require_train()
        value = {}
        rows = []
        for col in ds.columns:
            if col.ctype is not ColumnType.MIXED:
                continue
            present = col.non_missing()
            n_numbers = int(np.count_nonzero(~np.isnan(col.numeric)))
            minority = min(n_numbers, len(present) - n_numbers) / len(present)
            value[col.name] = minority
            rows.append([col.name, n_numbers, len(present) - n_numbers, minority])
        displays = [table("Mixed-type columns", ["column", "numbers", "strings", "minority fraction"], rows)] if rows else []
        return value, displays

    def default_conditions(self):
        rare = self.params["rare_fraction_max"]
        warn = self.params["warn_fraction_max"]

        def predicate(value):
            if not value:
                return PASS, "no mixed-type columns"
            failing = sorted(c for c, f in value.items() if 0 < f <= rare)
            warning = sorted(c for c, f in value.items() if rare < f <= warn)
            if failing:
                return FAIL, "rare type minority in column(s): " + ", ".join(
                    f"{c} ({value[c]:.2%})" for c in failing
                )
            if warning:
                return WARNING, "small type minority in column(s): " + ", ".join(
                    f"{c} ({value[c]:.2%})" for c in warning
                )
            return PASS, "mixed columns have balanced types: " + ", ".join(
                f"{c} ({value[c]:.2%})" for c in sorted(value)
            )

        return [Condition(f"No rare type minority (under {rare:.0%}) in any column", predicate)]

    def headline(self, value):
        return max(value.values()) if value else 0.0


class OutliersCheck(Check):
    check_id = "outliers"
    category = Category.INTEGRITY
    param_specs = {
        "iqr_multiplier": Param(3.0, "positive"),
        "warn_fraction": Param(0.01, "fraction"),
        "min_values": Param(10, "count"),
    }
    headline_desc = "largest per-column outlier fraction"

    def run(self, ctx: CheckContext):
        ds = ctx.require_train()
        mult = self.params["iqr_multiplier"]
        value = {}
        rows = []
        skipped = []
        for col in ds.columns:
            if col.ctype is not ColumnType.NUMERIC:
                continue
            vals = col.numeric[~np.isnan(col.numeric)]
            if vals.size < self.params["min_values"]:
                skipped.append(col.name)
                continue
            q1, q3 = np.quantile(vals, [0.25, 0.75])
            iqr = q3 - q1
            lo, hi = q1 - mult * iqr, q3 + mult * iqr
            fraction = float(np.mean((vals < lo) | (vals > hi)))
            value[col.name] = fraction
            rows.append([col.name, fraction, f"[{lo:.6g}, {hi:.6g}]"])
        displays = [table("Outlier fractions (IQR rule)", ["column", "fraction", "bounds"], rows)] if rows else []
        message = None
        if skipped:
            message = "column(s) with too few values skipped: " + ", ".join(skipped)
        return value, displays, message

    def default_conditions(self):
        limit = self.params["warn_fraction"]

        def predicate(value):
            noisy = sorted(c for c, f in value.items() if f > limit)
            if noisy:
                return WARNING, "outlier fraction above " + f"{limit:.0%}" + " in column(s): " + ", ".join(
                    f"{c} ({value[c]:.2%})" for c in noisy
                )
            return PASS, f"all outlier fractions within {limit:.0%}"

        return [Condition(f"Outlier fraction not greater than {limit:.0%}", predicate)]

    def headline(self, value):
        return max(value.values()) if value else 0.0


class ConflictingLabelsCheck(Check):
    check_id = "conflicting_labels"
    category = Category.INTEGRITY
    param_specs = {"max_conflict_fraction": Param(0.0, "fraction")}
    headline_desc = "fraction of rows with conflicting labels"

    def run(self, ctx: CheckContext):
        ds = ctx.require_labeled("train")
        keys = feature_row_keys(ds)
        label = ds.label
        groups: dict = {}
        for i, k in enumerate(keys):
            groups.setdefault(k, []).append(i)
        conflicting = []
        n_conflicting_rows = 0
        for k, idxs in groups.items():
            if len(idxs) < 2:
                continue
            labels = {label.values[i] for i in idxs}
            if len(labels) > 1:
                conflicting.append((k, idxs, labels))
                n_conflicting_rows += len(idxs)
        fraction = n_conflicting_rows / ds.n_rows if ds.n_rows else 0.0
        displays = []
        if conflicting:
            conflicting.sort(key=lambda g: (-len(g[1]), str(g[0])))
            rows = [
                preview_cells(k) + [len(idxs), ", ".join(sorted("(missing)" if v is None else v for v in labels))]
                for k, idxs, labels in conflicting[:5]
            ]
            header = list(ds.feature_names[:6]) + (["..."] if len(ds.feature_names) > 6 else [])
            displays.append(table("Conflicting label groups", header + ["rows", "labels"], rows))
        return fraction, displays

    def default_conditions(self):
        limit = self.params["max_conflict_fraction"]

        def predicate(value):
            if value > limit:
                return FAIL, f"{value:.2%} of rows share features but disagree on the label"
            return PASS, "no conflicting labels"

        return [Condition("No identical rows with conflicting labels", predicate)]

    def headline(self, value):
        return float(value)


class TrainTestSchemaCheck(Check):
    check_id = "train_test_schema"
    category = Category.INTEGRITY
    headline_desc = "number of schema discrepancies"

    def run(self, ctx: CheckContext):
        train = ctx.require_train()
        test = ctx.require_test()
        discrepancies = validate_shared_schema(train, test)
        value = [{"kind": d.kind, "name": d.name, "detail": d.detail} for d in discrepancies]
        displays = []
        if value:
            displays.append(table("Schema discrepancies", ["kind", "name", "detail"], [[d["kind"], d["name"], d["detail"]] for d in value]))
        return value, displays

    def default_conditions(self):
        def predicate(value):
            if value:
                return FAIL, f"found {len(value)} schema discrepanc{'y' if len(value) == 1 else 'ies'}: " + "; ".join(
                    d["detail"] for d in value[:3]
                )
            return PASS, "train and test schemas match"

        return [Condition("Train and test schemas match", predicate)]

    def headline(self, value):
        return float(len(value))
