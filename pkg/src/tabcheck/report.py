"""Machine-readable report documents.

The JSON document is deterministic given the suite result: keys appear in
declaration order, floats carry at most 12 significant digits, and
non-finite numbers become null with a per-check ``nonfinite`` flag.
"""

from __future__ import annotations

import json
import math
from importlib import resources

from tabcheck.framework import ENGINE_VERSION, SuiteResult

SCHEMA_VERSION = 1


class _NonfiniteFlag:
    def __init__(self) -> None:
        self.seen = False


def _canonical(obj, flag: _NonfiniteFlag):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            flag.seen = True
            return None
        return float(format(obj, ".12g"))
    if isinstance(obj, dict):
        return {str(k): _canonical(v, flag) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v, flag) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _canonical(obj.item(), flag)
    return str(obj)


def build_document(result: SuiteResult) -> dict:
    """The report as a plain JSON-ready dict."""
    checks = []
    for entry in result.entries:
        r = entry.result
        flag = _NonfiniteFlag()
        record = {
            "check_id": r.check_id,
            "category": r.category.value,
            "status": r.status.value,
            "message": r.message,
            "value": _canonical(r.value, flag),
            "conditions": [
                {"name": c.name, "status": c.status.value, "details": c.details}
                for c in entry.condition_results
            ],
            "displays": [
                {"kind": d.kind.value, "payload": _canonical(d.payload, flag)} for d in r.displays
            ],
        }
        if flag.seen:
            record["nonfinite"] = True
        checks.append(record)
    return {
        "suite": result.suite_name,
        "engine_version": ENGINE_VERSION,
        "schema_version": SCHEMA_VERSION,
        "meta": {
            "started_at": result.meta.started_at,
            "finished_at": result.meta.finished_at,
            "seed": result.meta.seed,
            "datasets": result.meta.datasets,
        },
        "summary": dict(result.summary),
        "checks": checks,
    }


def render_json(result: SuiteResult) -> bytes:
    return (json.dumps(build_document(result), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def load_schema() -> dict:
    """The shipped JSON schema the emitted documents validate against."""
    with resources.files("tabcheck").joinpath("schema/report_schema.json").open("r", encoding="utf-8") as fh:
        return json.load(fh)
