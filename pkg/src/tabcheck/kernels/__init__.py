"""Pure numerical kernels shared by the check catalog."""

from tabcheck.kernels.binning import bin_index, bin_label, quantile_bins
from tabcheck.kernels.distances import DriftMethod, DriftScore, Histogram, emd_normalized, psi
from tabcheck.kernels.metrics import (
    MetricSet,
    brier_score,
    calibration_bins,
    compute_metrics,
    per_class_stats,
    weighted_f1,
)
from tabcheck.kernels.pps import PpsResult, pps
from tabcheck.kernels.tree import DecisionTree, Feature, TreeParams, fit_tree, predict_tree
from tabcheck.kernels.trust import TrustParams, trust_scores

__all__ = [
    "DriftMethod",
    "DriftScore",
    "Histogram",
    "psi",
    "emd_normalized",
    "quantile_bins",
    "bin_index",
    "bin_label",
    "MetricSet",
    "compute_metrics",
    "brier_score",
    "calibration_bins",
    "per_class_stats",
    "weighted_f1",
    "TreeParams",
    "DecisionTree",
    "Feature",
    "fit_tree",
    "predict_tree",
    "PpsResult",
    "pps",
    "TrustParams",
    "trust_scores",
]
