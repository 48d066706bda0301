"""tabcheck: validation suites for tabular ML data and model predictions."""

from tabcheck.adapter import (
    AdapterError,
    ImportanceReport,
    PredictAdapter,
    Predictions,
    load_predictions_csv,
    permutation_importance,
    predict_via_command,
    serialize_predictions,
)
from tabcheck.dataset import (
    Column,
    ColumnType,
    Dataset,
    LoadError,
    SchemaOptions,
    Task,
    infer_column_type,
    load_csv,
    validate_shared_schema,
)
from tabcheck.framework import (
    Category,
    Check,
    CheckContext,
    CheckResult,
    CheckSkip,
    CheckStatus,
    Condition,
    ConditionResult,
    ConditionStatus,
    DisplayItem,
    DisplayKind,
    Suite,
    SuiteEntry,
    SuiteResult,
    evaluate_conditions,
    run_check,
    run_suite,
)
from tabcheck.htmlreport import render_html
from tabcheck.report import render_json
from tabcheck.suites import builtin_suites, single_check_suite, suite_from_spec

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "Category",
    "Check",
    "CheckContext",
    "CheckResult",
    "CheckSkip",
    "CheckStatus",
    "Column",
    "ColumnType",
    "Condition",
    "ConditionResult",
    "ConditionStatus",
    "Dataset",
    "DisplayItem",
    "DisplayKind",
    "ImportanceReport",
    "LoadError",
    "PredictAdapter",
    "Predictions",
    "SchemaOptions",
    "Suite",
    "SuiteEntry",
    "SuiteResult",
    "Task",
    "builtin_suites",
    "evaluate_conditions",
    "infer_column_type",
    "load_csv",
    "load_predictions_csv",
    "permutation_importance",
    "predict_via_command",
    "render_html",
    "render_json",
    "run_check",
    "run_suite",
    "serialize_predictions",
    "single_check_suite",
    "suite_from_spec",
    "validate_shared_schema",
]
