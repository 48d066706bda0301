"""Quantile binning shared by the weak-segments and display code."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def quantile_bins(values: Sequence[float], n: int) -> list:
    """Interior edges for at most ``n`` right-open quantile bins.

    Edges are the linearly interpolated quantiles at i/n. Duplicate edges
    and edges that would delimit an empty bin are collapsed, so constant or
    few-valued samples yield fewer bins. Bin k of edges [e1..ek] is
    [e_k, e_{k+1}) with open ends at both extremes; every value falls in
    exactly one bin.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("values must be nonempty")
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return []
    edges = np.quantile(arr, [i / n for i in range(1, n)])
    kept = []
    seen = set()
    for e in edges:
        below = int(np.count_nonzero(arr < e))
        if below == 0 or below == arr.size or below in seen:
            continue
        seen.add(below)
        kept.append(float(e))
    return kept


def bin_index(values: Sequence[float], edges: Sequence[float]) -> np.ndarray:
    """Bin index in [0, len(edges)] for each value (right-open bins)."""
    return np.searchsorted(np.asarray(edges, dtype=float), np.asarray(values, dtype=float), side="right")


def bin_label(edges: Sequence[float], index: int) -> str:
    """Human-readable range label for one bin."""
    if not edges:
        return "all"
    if index == 0:
        return f"< {edges[0]:.4g}"
    if index == len(edges):
        return f">= {edges[-1]:.4g}"
    return f"[{edges[index - 1]:.4g}, {edges[index]:.4g})"
