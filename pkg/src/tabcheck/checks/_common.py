"""Helpers shared across the check catalog."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from tabcheck.dataset import ColumnType, Dataset, parse_number
from tabcheck.framework import histogram_pair


def canonical_cell(column, value: Optional[str]):
    """Cell value used for row-equality: parsed floats for numeric columns,
    raw text otherwise, None only equal to None."""
    if value is None:
        return None
    if column.ctype is ColumnType.NUMERIC:
        number = parse_number(value)
        return number if number is not None else value
    return value


def feature_row_keys(ds: Dataset, feature_names: Optional[Sequence[str]] = None) -> list:
    """Hashable per-row keys over the feature columns."""
    names = list(feature_names) if feature_names is not None else list(ds.feature_names)
    cols = [ds.column(n) for n in names]
    keys = []
    for i in range(ds.n_rows):
        keys.append(tuple(canonical_cell(c, c.values[i]) for c in cols))
    return keys


def preview_cells(key: tuple, limit: int = 6) -> list:
    cells = ["" if v is None else str(v) for v in key[:limit]]
    if len(key) > limit:
        cells.append("...")
    return cells


def numeric_pair_histogram(name: str, score_note: str, a: np.ndarray, b: np.ndarray, n_bins: int = 10):
    """Overlaid proportion histograms of two numeric samples on shared bins."""
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    if hi == lo:
        labels = [f"{lo:.4g}"]
        return histogram_pair(
            name, labels,
            {"name": "train", "values": [1.0]},
            {"name": "test", "values": [1.0]},
            note=score_note,
        )
    edges = np.linspace(lo, hi, n_bins + 1)
    prop_a, _ = np.histogram(a, bins=edges)
    prop_b, _ = np.histogram(b, bins=edges)
    labels = [f"[{edges[i]:.4g}, {edges[i+1]:.4g})" for i in range(n_bins)]
    return histogram_pair(
        name, labels,
        {"name": "train", "values": [float(x) / a.size for x in prop_a]},
        {"name": "test", "values": [float(x) / b.size for x in prop_b]},
        note=score_note,
    )


def categorical_pair_histogram(name: str, score_note: str, a: Sequence[str], b: Sequence[str], top: int = 10):
    """Overlaid proportion bars of two categorical samples (top categories)."""
    counts_a: dict = {}
    counts_b: dict = {}
    for v in a:
        counts_a[v] = counts_a.get(v, 0) + 1
    for v in b:
        counts_b[v] = counts_b.get(v, 0) + 1
    combined = {c: counts_a.get(c, 0) + counts_b.get(c, 0) for c in set(counts_a) | set(counts_b)}
    cats = sorted(combined, key=lambda c: (-combined[c], c))
    keep = cats[:top]
    labels = list(keep)
    pa = [counts_a.get(c, 0) / max(len(a), 1) for c in keep]
    pb = [counts_b.get(c, 0) / max(len(b), 1) for c in keep]
    if len(cats) > top:
        labels.append("Other")
        pa.append(sum(counts_a.get(c, 0) for c in cats[top:]) / max(len(a), 1))
        pb.append(sum(counts_b.get(c, 0) for c in cats[top:]) / max(len(b), 1))
    return histogram_pair(
        name, labels,
        {"name": "train", "values": pa},
        {"name": "test", "values": pb},
        note=score_note,
    )


def proportions_over(values: Sequence[str], categories: Sequence[str]) -> list:
    counts: dict = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    n = max(len(values), 1)
    return [counts.get(c, 0) / n for c in categories]
