"""Distribution distances used by the drift checks.

PSI (Population Stability Index) compares category proportions; the
normalized Earth Mover's Distance compares numeric samples on a [0, 1]
scale so one threshold works across features of any unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

PSI_CLAMP = 1e-6


class DriftMethod(Enum):
    EMD = "EMD"
    PSI = "PSI"


@dataclass(frozen=True)
class Histogram:
    """Named bins with proportions summing to 1."""

    bin_labels: tuple
    proportions: tuple

    def __post_init__(self) -> None:
        if len(self.bin_labels) != len(self.proportions):
            raise ValueError("bin_labels and proportions must have the same length")
        total = sum(self.proportions)
        if not math.isclose(total, 1.0, abs_tol=1e-9):
            raise ValueError(f"proportions sum to {total}, expected 1")
        if any(p < 0 or p > 1 for p in self.proportions):
            raise ValueError("proportions must lie in [0, 1]")

    @classmethod
    def from_counts(cls, labels: Sequence[str], counts: Sequence[float]) -> "Histogram":
        total = float(sum(counts))
        if total <= 0:
            raise ValueError("counts must sum to a positive total")
        return cls(tuple(labels), tuple(c / total for c in counts))


@dataclass(frozen=True)
class DriftScore:
    value: float
    method: DriftMethod


def psi(p: Histogram, q: Histogram) -> DriftScore:
    """Population Stability Index between two aligned histograms.

    Proportions are clamped below at 1e-6 before the log so disjoint
    categories stay finite. Symmetric in its arguments; 0 iff the clamped
    histograms are equal.
    """
    if p.bin_labels != q.bin_labels:
        raise ValueError("histograms must share the same bin labels")
    total = 0.0
    for pi, qi in zip(p.proportions, q.proportions):
        pi = max(pi, PSI_CLAMP)
        qi = max(qi, PSI_CLAMP)
        total += (qi - pi) * math.log(qi / pi)
    return DriftScore(total, DriftMethod.PSI)


def emd_normalized(ref: Sequence[float], cur: Sequence[float]) -> DriftScore:
    """Exact 1-D Wasserstein-1 distance after joint min-max scaling.

    Both samples are scaled by their combined min/max, so the result lies
    in [0, 1]. Computed from the sorted empirical CDFs, not by sampling.
    A combined range of zero yields 0.
    """
    a = np.asarray(ref, dtype=float)
    b = np.asarray(cur, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("samples must be nonempty")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("samples must be finite")
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    if hi == lo:
        return DriftScore(0.0, DriftMethod.EMD)
    a = np.sort((a - lo) / (hi - lo))
    b = np.sort((b - lo) / (hi - lo))
    points = np.unique(np.concatenate([a, b]))
    cdf_a = np.searchsorted(a, points, side="right") / a.size
    cdf_b = np.searchsorted(b, points, side="right") / b.size
    dist = float(np.sum(np.abs(cdf_a[:-1] - cdf_b[:-1]) * np.diff(points)))
    return DriftScore(min(max(dist, 0.0), 1.0), DriftMethod.EMD)
