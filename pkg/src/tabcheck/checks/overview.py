"""Overview checks: dataset summary metadata."""

from __future__ import annotations

import numpy as np

from tabcheck.dataset import ColumnType
from tabcheck.framework import Category, Check, CheckContext, table


class DatasetSummaryCheck(Check):
    check_id = "dataset_summary"
    category = Category.OVERVIEW

    def run(self, ctx: CheckContext):
        ds = ctx.require_train()
        records = []
        for col in ds.columns:
            role = "label" if col.name == ds.label_name else "feature"
            record = {
                "column": col.name,
                "role": role,
                "type": col.ctype.value,
                "missing_fraction": col.n_missing / len(col) if len(col) else 0.0,
                "distinct": col.distinct_count(),
            }
            if col.ctype is ColumnType.NUMERIC:
                vals = col.numeric[~np.isnan(col.numeric)]
                record["min"] = float(vals.min()) if vals.size else None
                record["max"] = float(vals.max()) if vals.size else None
            else:
                counts: dict = {}
                for v in col.non_missing():
                    counts[v] = counts.get(v, 0) + 1
                top = sorted(counts, key=lambda c: (-counts[c], c))[:3]
                record["top_categories"] = top
            records.append(record)

        rows = []
        for r in records:
            extent = (
                f"[{r['min']:.6g}, {r['max']:.6g}]"
                if "min" in r and r["min"] is not None
                else ", ".join(r.get("top_categories", []))
            )
            rows.append([r["column"], r["role"], r["type"], f"{r['missing_fraction']:.2%}", r["distinct"], extent])
        displays = [table(
            "Column summary",
            ["column", "role", "type", "missing", "distinct", "range / top categories"],
            rows,
        )]
        message = None
        if ds.meta.sampled:
            message = (
                f"dataset sampled to {ds.n_rows} of {ds.meta.n_source_rows} rows "
                f"(seed {ds.meta.sample_seed})"
            )
        return records, displays, message
