"""The built-in check catalog, keyed by stable check id."""

from tabcheck.checks.distribution import FeatureDriftCheck, LabelDriftCheck, TrustScoreCheck
from tabcheck.checks.evaluation import (
    CalibrationCheck,
    ErrorDistributionCheck,
    PerformanceReportCheck,
    SimpleModelComparisonCheck,
    WeakSegmentsCheck,
)
from tabcheck.checks.integrity import (
    ConflictingLabelsCheck,
    DuplicatesCheck,
    MixedTypesCheck,
    OutliersCheck,
    SingleValueCheck,
    TrainTestSchemaCheck,
)
from tabcheck.checks.methodology import (
    FeatureLabelCorrelationCheck,
    PpsDifferenceCheck,
    TrainTestLeakageCheck,
    UnusedFeaturesCheck,
)
from tabcheck.checks.overview import DatasetSummaryCheck

_CHECK_CLASSES = [
    DuplicatesCheck,
    SingleValueCheck,
    MixedTypesCheck,
    OutliersCheck,
    ConflictingLabelsCheck,
    TrainTestSchemaCheck,
    DatasetSummaryCheck,
    FeatureDriftCheck,
    LabelDriftCheck,
    TrustScoreCheck,
    TrainTestLeakageCheck,
    FeatureLabelCorrelationCheck,
    PpsDifferenceCheck,
    UnusedFeaturesCheck,
    PerformanceReportCheck,
    SimpleModelComparisonCheck,
    CalibrationCheck,
    ErrorDistributionCheck,
    WeakSegmentsCheck,
]

CHECKS = {cls.check_id: cls for cls in _CHECK_CLASSES}


def get_check_class(check_id: str):
    if check_id not in CHECKS:
        raise KeyError(f"unknown check '{check_id}' (known: {', '.join(sorted(CHECKS))})")
    return CHECKS[check_id]


__all__ = ["CHECKS", "get_check_class"] + [cls.__name__ for cls in _CHECK_CLASSES]
