"""Checks, conditions and suites.

A check inspects one aspect of the data or model and returns a typed value
plus display payloads. Conditions turn check values into pass/fail/warning
judgments. Suites run an ordered list of checks, never letting one check's
failure stop the rest, and roll the outcomes up into summary counts.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, ClassVar, Optional, Sequence

from tabcheck.adapter import Predictions
from tabcheck.dataset import Dataset, Task

ENGINE_VERSION = "0.1.0"


class Category(Enum):
    DISTRIBUTION = "distribution"
    INTEGRITY = "integrity"
    METHODOLOGY = "methodology"
    EVALUATION = "evaluation"
    OVERVIEW = "overview"


class CheckStatus(Enum):
    RAN = "ran"
    SKIPPED = "skipped"
    ERRORED = "errored"


class ConditionStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    WARNING = "warning"


class DisplayKind(Enum):
    TABLE = "table"
    BAR_SERIES = "bar_series"
    LINE_SERIES = "line_series"
    HISTOGRAM_PAIR = "histogram_pair"
    TEXT = "text"


class CheckSkip(Exception):
    """Raised inside a check to signal an unmet declared requirement."""


@dataclass
class DisplayItem:
    kind: DisplayKind
    payload: dict

    def __post_init__(self) -> None:
        series = self.payload.get("series")
        if series:
            lengths = set()
            for s in series:
                for key in ("values", "x", "y"):
                    if key in s:
                        lengths.add(len(s[key]))
            if len(lengths) > 1:
                raise ValueError(f"series in one display item must have equal lengths, got {sorted(lengths)}")


def table(title: str, columns: Sequence[str], rows: Sequence[Sequence]) -> DisplayItem:
    return DisplayItem(DisplayKind.TABLE, {"title": title, "columns": list(columns), "rows": [list(r) for r in rows]})


def bar_series(title: str, labels: Sequence[str], series: Sequence[dict]) -> DisplayItem:
    return DisplayItem(DisplayKind.BAR_SERIES, {"title": title, "labels": list(labels), "series": list(series)})


def line_series(title: str, series: Sequence[dict]) -> DisplayItem:
    return DisplayItem(DisplayKind.LINE_SERIES, {"title": title, "series": list(series)})


def histogram_pair(title: str, labels: Sequence[str], first: dict, second: dict, note: str = "") -> DisplayItem:
    return DisplayItem(
        DisplayKind.HISTOGRAM_PAIR,
        {"title": title, "labels": list(labels), "series": [first, second], "note": note},
    )


def text(content: str) -> DisplayItem:
    return DisplayItem(DisplayKind.TEXT, {"text": content})


@dataclass
class CheckResult:
    check_id: str
    category: Category
    value: Any
    displays: list
    status: CheckStatus
    message: Optional[str] = None

    def __post_init__(self) -> None:
        if self.status is CheckStatus.RAN and self.value is None:
            raise ValueError(f"check '{self.check_id}' ran but has no value")
        if self.status is not CheckStatus.RAN and not self.message:
            raise ValueError(f"check '{self.check_id}' is {self.status.value} but has no message")


@dataclass(frozen=True)
class ConditionResult:
    name: str
    status: ConditionStatus
    details: str


@dataclass(frozen=True)
class Condition:
    """A named, pure predicate over a check's value."""

    name: str
    predicate: Callable[[Any], tuple]

    def evaluate(self, value: Any) -> ConditionResult:
        status, details = self.predicate(value)
        return ConditionResult(self.name, status, details)


@dataclass(frozen=True)
class Param:
    """One check parameter: default value plus a validation kind."""

    default: Any
    kind: str  # fraction | count | positive | number | optional_fraction | optional_number

    def validate(self, name: str, value: Any) -> Any:
        if value is None:
            if self.kind.startswith("optional"):
                return None
            raise ValueError(f"parameter '{name}' must not be null")
        kind = self.kind.removeprefix("optional_")
        if kind == "count":
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"parameter '{name}' must be an integer >= 1, got {value!r}")
            return value
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"parameter '{name}' must be a number, got {value!r}")
        value = float(value)
        if kind == "fraction" and not (0.0 <= value <= 1.0):
            raise ValueError(f"parameter '{name}' must lie in [0, 1], got {value}")
        if kind == "positive" and value <= 0:
            raise ValueError(f"parameter '{name}' must be positive, got {value}")
        return value


class Check:
    """Base class for catalog checks. Subclasses set identity and params."""

    check_id: ClassVar[str]
    category: ClassVar[Category]
    param_specs: ClassVar[dict] = {}
    headline_desc: ClassVar[Optional[str]] = None  # None: no scalar headline

    def __init__(self, **params: Any) -> None:
        unknown = set(params) - set(self.param_specs)
        if unknown:
            raise ValueError(f"unknown parameter(s) for check '{self.check_id}': {', '.join(sorted(unknown))}")
        self.params = {name: spec.default for name, spec in self.param_specs.items()}
        for name, value in params.items():
            self.params[name] = self.param_specs[name].validate(name, value)

    def run(self, ctx: "CheckContext"):
        """Return (value, displays) or (value, displays, message)."""
        raise NotImplementedError

    def default_conditions(self) -> list:
        return []

    def headline(self, value: Any) -> Optional[float]:
        """Scalar summary of the value, used by generic threshold conditions."""
        return None


class CheckContext:
    """Read-only inputs shared by every check in a suite run."""

    def __init__(
        self,
        train: Optional[Dataset] = None,
        test: Optional[Dataset] = None,
        predictions_train: Optional[Predictions] = None,
        predictions_test: Optional[Predictions] = None,
        adapter=None,
        config: Optional[dict] = None,
        seed: int = 42,
    ) -> None:
        if train is None and test is None:
            raise ValueError("at least one dataset is required")
        self.train = train
        self.test = test
        self.adapter = adapter
        self.config = dict(config or {})
        self.seed = seed
        self._predictions = {"train": predictions_train, "test": predictions_test}
        self._computed: dict = {}

    # -- datasets -------------------------------------------------------------

    def require_train(self) -> Dataset:
        if self.train is None:
            raise CheckSkip("requires train dataset")
        return self.train

    def require_test(self) -> Dataset:
        if self.test is None:
            raise CheckSkip("requires test dataset")
        return self.test

    def eval_split(self) -> str:
        """The split model-evaluation checks run on: test when present."""
        return "test" if self.test is not None else "train"

    def dataset(self, split: str) -> Dataset:
        ds = self.train if split == "train" else self.test
        if ds is None:
            raise CheckSkip(f"requires {split} dataset")
        return ds

    def require_labeled(self, split: str) -> Dataset:
        ds = self.dataset(split)
        if ds.label_name is None or ds.task is Task.UNLABELED:
            raise CheckSkip(f"requires labeled {split} dataset")
        return ds

    def require_adapter(self):
        if self.adapter is None:
            raise CheckSkip("requires predict command")
        return self.adapter

    # -- predictions ----------------------------------------------------------

    def classes(self) -> Optional[tuple]:
        """Sorted class labels over all labeled classification datasets."""
        values: set = set()
        for ds in (self.train, self.test):
            if ds is not None and ds.task is Task.CLASSIFICATION and ds.label is not None:
                values.update(v for v in ds.label.values if v is not None)
        return tuple(sorted(values)) if values else None

    def predictions_for(self, split: str) -> Predictions:
        """File predictions when given, else adapter predictions (cached)."""
        ds = self.dataset(split)
        given = self._predictions.get(split)
        if given is not None:
            if len(given.predicted) != ds.n_rows:
                raise ValueError(
                    f"predictions for {split} have {len(given.predicted)} rows, "
                    f"dataset has {ds.n_rows}"
                )
            return given
        if split in self._computed:
            return self._computed[split]
        if self.adapter is None:
            raise CheckSkip(f"requires predictions for {split} dataset")
        task = Task.UNLABELED
        for candidate in (ds, self.train, self.test):
            if candidate is not None and candidate.task is not Task.UNLABELED:
                task = candidate.task
                break
        if task is Task.UNLABELED:
            raise CheckSkip("cannot infer the prediction task: no labeled dataset")
        classes = self.classes() if task is Task.CLASSIFICATION else None
        if task is Task.CLASSIFICATION and not classes:
            raise CheckSkip("cannot determine the class set: no labeled classification dataset")
        preds = self.adapter.predict(list(ds.feature_names), ds.feature_rows(), task, classes)
        if len(preds.predicted) != ds.n_rows:
            raise ValueError(
                f"adapter returned {len(preds.predicted)} rows for {split}, dataset has {ds.n_rows}"
            )
        self._computed[split] = preds
        return preds


def run_check(check: Check, ctx: CheckContext) -> CheckResult:
    """Run one check; requirement gaps become Skipped, faults become Errored."""
    try:
        out = check.run(ctx)
        value, displays = out[0], list(out[1])
        message = out[2] if len(out) > 2 else None
        return CheckResult(check.check_id, check.category, value, displays, CheckStatus.RAN, message)
    except CheckSkip as skip:
        return CheckResult(check.check_id, check.category, None, [], CheckStatus.SKIPPED, str(skip))
    except Exception as exc:  # noqa: BLE001 - containment is the contract
        detail = getattr(exc, "stderr_text", None)
        message = f"{type(exc).__name__}: {exc}"
        if detail:
            message += f" [stderr: {detail.strip()}]"
        return CheckResult(check.check_id, check.category, None, [], CheckStatus.ERRORED, message)


def evaluate_conditions(result: CheckResult, conditions: Sequence[Condition]) -> list:
    """One ConditionResult per condition; non-Ran checks yield warnings."""
    out = []
    for cond in conditions:
        if result.status is not CheckStatus.RAN:
            out.append(ConditionResult(cond.name, ConditionStatus.WARNING, result.message or ""))
        else:
            out.append(cond.evaluate(result.value))
    return out


@dataclass
class SuiteEntry:
    check: Check
    conditions: list


@dataclass
class Suite:
    name: str
    entries: list


@dataclass
class SuiteEntryResult:
    result: CheckResult
    condition_results: list


@dataclass
class RunMeta:
    started_at: str = ""
    finished_at: str = ""
    seed: int = 42
    datasets: dict = field(default_factory=dict)
    engine_version: str = ENGINE_VERSION


@dataclass
class SuiteResult:
    suite_name: str
    entries: list
    summary: dict
    meta: RunMeta


def check_outcome(result: CheckResult, condition_results: Sequence[ConditionResult]) -> str:
    """Summary bucket for one check under the counting contract."""
    if result.status is CheckStatus.SKIPPED:
        return "skipped"
    if result.status is CheckStatus.ERRORED:
        return "errored"
    if any(c.status is ConditionStatus.FAIL for c in condition_results):
        return "failed"
    if any(c.status is ConditionStatus.WARNING for c in condition_results):
        return "warned"
    return "passed"


def summarize(entries: Sequence[SuiteEntryResult]) -> dict:
    counts = {"passed": 0, "failed": 0, "warned": 0, "skipped": 0, "errored": 0}
    for entry in entries:
        counts[check_outcome(entry.result, entry.condition_results)] += 1
    return counts


def _dataset_meta(ds: Optional[Dataset]) -> Optional[dict]:
    if ds is None:
        return None
    note = None
    if ds.meta.sampled:
        note = (
            f"sampled {ds.n_rows} of {ds.meta.n_source_rows} rows "
            f"(seed {ds.meta.sample_seed})"
        )
    return {
        "source": ds.meta.source,
        "digest": ds.meta.digest,
        "rows": ds.n_rows,
        "task": ds.task.value,
        "sampled": ds.meta.sampled,
        "sampling_note": note,
    }


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def run_suite(suite: Suite, ctx: CheckContext) -> SuiteResult:
    """Run every entry in declaration order; no check failure escapes."""
    started = _now()
    entries = []
    for entry in suite.entries:
        result = run_check(entry.check, ctx)
        condition_results = evaluate_conditions(result, entry.conditions)
        entries.append(SuiteEntryResult(result, condition_results))
    meta = RunMeta(
        started_at=started,
        finished_at=_now(),
        seed=ctx.seed,
        datasets={
            split: meta
            for split, meta in (("train", _dataset_meta(ctx.train)), ("test", _dataset_meta(ctx.test)))
            if meta is not None
        },
    )
    return SuiteResult(suite.name, entries, summarize(entries), meta)
