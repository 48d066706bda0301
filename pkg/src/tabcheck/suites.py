"""Built-in suites and construction of suites from config.

Suite composition is plain data: an ordered list of check ids. Checks whose
requirements the context cannot satisfy (e.g. feature-label correlation on
an unlabeled dataset) report Skipped rather than being removed up front.
"""

from __future__ import annotations

from typing import Optional

from tabcheck.checks import CHECKS, get_check_class
from tabcheck.framework import Condition, ConditionStatus, Suite, SuiteEntry

BUILTIN_SUITE_IDS = {
    "data_integrity": [
        "duplicates",
        "single_value",
        "mixed_types",
        "outliers",
        "conflicting_labels",
        "dataset_summary",
        "feature_label_correlation",
    ],
    "train_test_validation": [
        "train_test_schema",
        "feature_drift",
        "label_drift",
        "train_test_leakage",
        "pps_difference",
        "trust_score",
    ],
    "model_evaluation": [
        "performance_report",
        "simple_model_comparison",
        "calibration",
        "error_distribution",
        "weak_segments",
        "unused_features",
    ],
}

_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


class SuiteSpecError(ValueError):
    """A config file or suite definition is malformed."""


def params_from_config(check_id: str, config: Optional[dict]) -> dict:
    """Extract ``checks.<id>.<param>`` overrides for one check."""
    if not config:
        return {}
    prefix = f"checks.{check_id}."
    return {key[len(prefix):]: value for key, value in config.items() if key.startswith(prefix)}


def validate_config_keys(config: dict) -> None:
    """Reject unknown or out-of-range config keys (typo safety)."""
    for key, value in config.items():
        if key == "suite":
            continue
        parts = key.split(".")
        if len(parts) != 3 or parts[0] != "checks":
            raise SuiteSpecError(f"unknown config key '{key}' (expected checks.<check_id>.<param>)")
        _, check_id, param = parts
        if check_id not in CHECKS:
            raise SuiteSpecError(f"unknown check '{check_id}' in config key '{key}'")
        specs = CHECKS[check_id].param_specs
        if param not in specs:
            known = ", ".join(sorted(specs)) or "(none)"
            raise SuiteSpecError(f"unknown parameter '{param}' for check '{check_id}' (known: {known})")
        try:
            specs[param].validate(param, value)
        except ValueError as exc:
            raise SuiteSpecError(f"config key '{key}': {exc}") from exc


def _custom_condition(check, spec: dict) -> Condition:
    if not isinstance(spec, dict):
        raise SuiteSpecError(f"condition spec for check '{check.check_id}' must be an object")
    unknown = set(spec) - {"name", "op", "threshold", "severity"}
    if unknown:
        raise SuiteSpecError(f"unknown condition key(s) for check '{check.check_id}': {', '.join(sorted(unknown))}")
    op = spec.get("op")
    if op not in _OPS:
        raise SuiteSpecError(f"condition for check '{check.check_id}' needs an op from {sorted(_OPS)}")
    threshold = spec.get("threshold")
    if not isinstance(threshold, (int, float)) or isinstance(threshold, bool):
        raise SuiteSpecError(f"condition for check '{check.check_id}' needs a numeric threshold")
    severity = spec.get("severity", "fail")
    if severity not in ("fail", "warning"):
        raise SuiteSpecError(f"condition severity must be 'fail' or 'warning', got '{severity}'")
    if check.headline_desc is None:
        raise SuiteSpecError(f"check '{check.check_id}' has no scalar headline; custom conditions are not supported")
    desc = check.headline_desc
    name = spec.get("name") or f"{desc} {op} {threshold:g}"
    bad_status = ConditionStatus.FAIL if severity == "fail" else ConditionStatus.WARNING

    def predicate(value, check=check, op=op, threshold=threshold):
        scalar = check.headline(value)
        detail = f"{desc} is {scalar:.6g} (required {op} {threshold:g})"
        return (ConditionStatus.PASS, detail) if _OPS[op](scalar, threshold) else (bad_status, detail)

    return Condition(name, predicate)


def _entry(check_id: str, config: Optional[dict], params: Optional[dict] = None, conditions=None) -> SuiteEntry:
    cls = get_check_class(check_id)
    merged = params_from_config(check_id, config)
    merged.update(params or {})
    try:
        check = cls(**merged)
    except ValueError as exc:
        raise SuiteSpecError(f"check '{check_id}': {exc}") from exc
    if conditions is None:
        resolved = check.default_conditions()
    else:
        resolved = [_custom_condition(check, spec) for spec in conditions]
    return SuiteEntry(check, resolved)


def builtin_suites(config: Optional[dict] = None) -> dict:
    """The three pre-defined suites, with config overrides applied."""
    return {
        name: Suite(name, [_entry(cid, config) for cid in ids])
        for name, ids in BUILTIN_SUITE_IDS.items()
    }


def single_check_suite(check_id: str, config: Optional[dict] = None) -> Suite:
    return Suite(check_id, [_entry(check_id, config)])


def suite_from_spec(spec: dict, config: Optional[dict] = None) -> Suite:
    """Build a custom suite from {"name": ..., "checks": [{"id": ...}]}."""
    if not isinstance(spec, dict):
        raise SuiteSpecError("suite spec must be an object")
    unknown = set(spec) - {"name", "checks"}
    if unknown:
        raise SuiteSpecError(f"unknown suite key(s): {', '.join(sorted(unknown))}")
    name = spec.get("name")
    if not isinstance(name, str) or not name:
        raise SuiteSpecError("suite spec needs a nonempty 'name'")
    checks = spec.get("checks")
    if not isinstance(checks, list) or not checks:
        raise SuiteSpecError("suite spec needs a nonempty 'checks' list")
    entries = []
    for item in checks:
        if not isinstance(item, dict) or "id" not in item:
            raise SuiteSpecError("each suite check needs an object with an 'id'")
        unknown = set(item) - {"id", "params", "conditions"}
        if unknown:
            raise SuiteSpecError(f"unknown check key(s): {', '.join(sorted(unknown))}")
        check_id = item["id"]
        if check_id not in CHECKS:
            raise SuiteSpecError(f"unknown check '{check_id}' in suite spec")
        params = item.get("params", {})
        if not isinstance(params, dict):
            raise SuiteSpecError(f"params for check '{check_id}' must be an object")
        conditions = item.get("conditions")
        if conditions is not None and not isinstance(conditions, list):
            raise SuiteSpecError(f"conditions for check '{check_id}' must be a list")
        entries.append(_entry(check_id, config, params, conditions))
    return Suite(name, entries)
