"""Model access without a model object: prediction files and a stateless
predict-command protocol, plus permutation importance built on top.

Wire contract (bit-exact): the child process receives an RFC-4180 feature
CSV on stdin (header = feature names, missing cells empty), the task in
DEEPCHECKS_TASK and, for classification, the lexicographically sorted class
list in DEEPCHECKS_CLASSES (comma-joined). It must write a CSV with header
``prediction[,proba_<c1>,proba_<c2>,...]`` to stdout and exit 0.
"""

from __future__ import annotations

import csv
import io
import os
import subprocess
import shlex
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from tabcheck.dataset import Dataset, Task, parse_number

TASK_ENV = "DEEPCHECKS_TASK"
CLASSES_ENV = "DEEPCHECKS_CLASSES"


class AdapterError(RuntimeError):
    """The prediction command failed; carries the child's stderr text."""

    def __init__(self, message: str, stderr_text: str = "") -> None:
        super().__init__(message)
        self.stderr_text = stderr_text


@dataclass(frozen=True)
class Predictions:
    """Per-row predictions, with class probabilities for classification."""

    task: Task
    predicted: tuple
    probabilities: Optional[tuple] = None
    classes: Optional[tuple] = None
    warnings: tuple = ()

    def __post_init__(self) -> None:
        if self.task is Task.CLASSIFICATION:
            if self.classes is None:
                raise ValueError("classification predictions require a class list")
            class_set = set(self.classes)
            for p in self.predicted:
                if p not in class_set:
                    raise ValueError(f"predicted class '{p}' not in classes {sorted(class_set)}")
            if self.probabilities is not None:
                for i, row in enumerate(self.probabilities):
                    if len(row) != len(self.classes):
                        raise ValueError(f"probability row {i} has {len(row)} entries, expected {len(self.classes)}")
                    total = sum(row)
                    if abs(total - 1.0) > 1e-6:
                        raise ValueError(f"probability row {i} sums to {total}, expected 1")

    @property
    def n_rows(self) -> int:
        return len(self.predicted)


@dataclass(frozen=True)
class PredictAdapter:
    """A stateless external prediction command, invoked per row batch."""

    command: tuple
    batch_limit: int = 10_000
    timeout: float = 60.0

    def __post_init__(self) -> None:
        if not self.command:
            raise ValueError("adapter command must be nonempty")
        if self.batch_limit < 1:
            raise ValueError("batch_limit must be >= 1")

    @classmethod
    def from_string(cls, command: str, **kwargs) -> "PredictAdapter":
        return cls(tuple(shlex.split(command)), **kwargs)

    def predict(self, feature_names: Sequence[str], rows: Sequence[Sequence], task: Task, classes=None) -> Predictions:
        return predict_via_command(self, feature_names, rows, task, classes)


def _format_float(x: float) -> str:
    return repr(float(x))


def parse_predictions_csv(text: str, task: Task, classes: Optional[Sequence[str]] = None) -> Predictions:
    """Parse prediction CSV text (the wire format and the file format)."""
    reader = csv.reader(text.splitlines(keepends=True))
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("prediction CSV is empty; a header row is required") from None
    if "prediction" not in header:
        raise ValueError(f"prediction CSV is missing the 'prediction' column (found: {', '.join(header)})")
    pred_idx = header.index("prediction")

    proba_idx: dict = {}
    if task is Task.CLASSIFICATION:
        if not classes:
            raise ValueError("classification predictions require a class list")
        classes = tuple(sorted(classes))
        missing = [c for c in classes if f"proba_{c}" not in header]
        if missing:
            raise ValueError("prediction CSV is missing column(s): " + ", ".join(f"proba_{c}" for c in missing))
        for col in header:
            if col.startswith("proba_"):
                cls_name = col[len("proba_"):]
                if cls_name not in classes:
                    raise ValueError(f"prediction CSV has probability column for unknown class '{cls_name}'")
                proba_idx[cls_name] = header.index(col)

    predicted = []
    probabilities = [] if proba_idx else None
    warnings = []
    mismatch_rows = []
    for i, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise ValueError(f"prediction CSV line {i}: expected {len(header)} fields, found {len(row)}")
        if task is Task.REGRESSION:
            value = parse_number(row[pred_idx])
            if value is None:
                raise ValueError(f"prediction CSV line {i}: '{row[pred_idx]}' is not a finite number")
            predicted.append(value)
        else:
            predicted.append(row[pred_idx])
        if proba_idx:
            probs = []
            for c in classes:
                p = parse_number(row[proba_idx[c]])
                if p is None:
                    raise ValueError(f"prediction CSV line {i}: probability '{row[proba_idx[c]]}' is not finite")
                probs.append(p)
            total = sum(probs)
            if abs(total - 1.0) > 1e-6:
                raise ValueError(f"prediction CSV line {i}: probabilities sum to {total}, expected 1")
            probabilities.append(tuple(probs))
            arg = classes[max(range(len(classes)), key=lambda j: probs[j])]
            if arg != row[pred_idx]:
                mismatch_rows.append(i)
    if mismatch_rows:
        shown = ", ".join(str(r) for r in mismatch_rows[:5])
        more = "" if len(mismatch_rows) <= 5 else f" (+{len(mismatch_rows) - 5} more)"
        warnings.append(f"argmax(probabilities) != prediction on line(s) {shown}{more}")

    return Predictions(
        task=task,
        predicted=tuple(predicted),
        probabilities=tuple(probabilities) if probabilities is not None else None,
        classes=tuple(classes) if task is Task.CLASSIFICATION else None,
        warnings=tuple(warnings),
    )


def load_predictions_csv(path: str, task: Task, classes: Optional[Sequence[str]] = None) -> Predictions:
    """Load a prediction CSV file; see the module docstring for the format."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValueError(f"cannot read '{path}': {exc}") from exc
    try:
        return parse_predictions_csv(text, task, classes)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def serialize_predictions(preds: Predictions) -> str:
    """Render predictions back to the wire CSV format."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["prediction"]
    if preds.task is Task.CLASSIFICATION and preds.probabilities is not None:
        header += [f"proba_{c}" for c in preds.classes]
    writer.writerow(header)
    for i, p in enumerate(preds.predicted):
        row = [p if preds.task is Task.CLASSIFICATION else _format_float(p)]
        if len(header) > 1:
            row += [_format_float(x) for x in preds.probabilities[i]]
        writer.writerow(row)
    return buf.getvalue()


def _feature_csv(feature_names: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(feature_names))
    for row in rows:
        writer.writerow(["" if cell is None else cell for cell in row])
    return buf.getvalue()


def predict_via_command(
    adapter: PredictAdapter,
    feature_names: Sequence[str],
    rows: Sequence[Sequence],
    task: Task,
    classes: Optional[Sequence[str]] = None,
) -> Predictions:
    """Run the prediction command over row batches and concatenate the output.

    Any child failure (nonzero exit, malformed CSV, row-count mismatch,
    timeout) raises AdapterError with the child's stderr attached; the check
    framework surfaces that as an Errored check result.
    """
    env = dict(os.environ)
    env[TASK_ENV] = task.value
    if task is Task.CLASSIFICATION:
        if not classes:
            raise ValueError("classification predictions require a class list")
        classes = tuple(sorted(classes))
        env[CLASSES_ENV] = ",".join(classes)
    else:
        env.pop(CLASSES_ENV, None)

    predicted: list = []
    probabilities: list = []
    have_probs = None
    warnings: list = []
    rows = list(rows)
    for start in range(0, max(len(rows), 1), adapter.batch_limit):
        chunk = rows[start : start + adapter.batch_limit]
        payload = _feature_csv(feature_names, chunk).encode("utf-8")
        try:
            proc = subprocess.run(
                list(adapter.command),
                input=payload,
                capture_output=True,
                timeout=adapter.timeout,
                env=env,
            )
        except subprocess.TimeoutExpired as exc:
            stderr = (exc.stderr or b"").decode("utf-8", "replace")
            raise AdapterError(f"prediction command timed out after {adapter.timeout}s", stderr) from exc
        except OSError as exc:
            raise AdapterError(f"cannot run prediction command: {exc}") from exc
        stderr = proc.stderr.decode("utf-8", "replace")
        if proc.returncode != 0:
            raise AdapterError(f"prediction command exited with code {proc.returncode}", stderr)
        try:
            part = parse_predictions_csv(proc.stdout.decode("utf-8", "replace"), task, classes)
        except ValueError as exc:
            raise AdapterError(f"malformed prediction output: {exc}", stderr) from exc
        if part.n_rows != len(chunk):
            raise AdapterError(
                f"prediction command returned {part.n_rows} rows for a batch of {len(chunk)}", stderr
            )
        chunk_has_probs = part.probabilities is not None
        if have_probs is None:
            have_probs = chunk_has_probs
        elif have_probs != chunk_has_probs:
            raise AdapterError("prediction command emitted inconsistent probability columns across batches", stderr)
        predicted.extend(part.predicted)
        if chunk_has_probs:
            probabilities.extend(part.probabilities)
        warnings.extend(part.warnings)

    return Predictions(
        task=task,
        predicted=tuple(predicted),
        probabilities=tuple(probabilities) if have_probs else None,
        classes=tuple(classes) if task is Task.CLASSIFICATION else None,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class ImportanceReport:
    """Permutation importance: raw metric drops and normalized shares."""

    raw_drop: dict
    normalized: dict
    repeats: int
    seed: int
    metric_name: str
    baseline_score: float

    def __post_init__(self) -> None:
        total = sum(max(d, 0.0) for d in self.raw_drop.values())
        if total > 0:
            share_sum = sum(self.normalized.values())
            if abs(share_sum - 1.0) > 1e-9:
                raise ValueError(f"normalized shares sum to {share_sum}, expected 1")


def _metric_score(task: Task, labels: Sequence, preds: Predictions) -> float:
    if task is Task.CLASSIFICATION:
        pairs = [(t, p) for t, p in zip(labels, preds.predicted) if t is not None]
        if not pairs:
            raise ValueError("no labeled rows to score")
        return sum(1 for t, p in pairs if t == p) / len(pairs)
    truth = []
    guess = []
    for t, p in zip(labels, preds.predicted):
        if t is None:
            continue
        truth.append(parse_number(t) if isinstance(t, str) else float(t))
        guess.append(float(p))
    if not truth:
        raise ValueError("no labeled rows to score")
    err = np.asarray(truth) - np.asarray(guess)
    return -float(np.sqrt(np.mean(err**2)))


def permutation_importance(
    adapter,
    dataset: Dataset,
    baseline: Optional[Predictions] = None,
    metric: Optional[str] = None,
    repeats: int = 5,
    seed: int = 42,
) -> ImportanceReport:
    """Metric drop per feature when that feature's column is shuffled.

    The shuffle seed for feature j and repeat r is ``seed + 31*j + r`` where
    j is the feature's rank in name-sorted order, so results do not depend
    on column order. Negative drops are clamped to 0 in the normalized
    shares; raw drops keep their sign.
    """
    if dataset.label_name is None or dataset.task is Task.UNLABELED:
        raise ValueError("permutation importance requires a labeled dataset")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    task = dataset.task
    expected = "accuracy" if task is Task.CLASSIFICATION else "neg_rmse"
    metric_name = metric or expected
    if metric_name not in ("accuracy", "neg_rmse"):
        raise ValueError(f"unknown metric '{metric_name}'")
    if metric_name != expected:
        raise ValueError(f"metric '{metric_name}' does not apply to a {task.value} task")

    feature_names = list(dataset.feature_names)
    rows = dataset.feature_rows()
    labels = list(dataset.label.values)
    classes = tuple(sorted({v for v in labels if v is not None})) if task is Task.CLASSIFICATION else None

    if baseline is None:
        baseline = adapter.predict(feature_names, rows, task, classes)
    if baseline.n_rows != dataset.n_rows:
        raise ValueError(f"baseline predictions have {baseline.n_rows} rows, dataset has {dataset.n_rows}")
    baseline_score = _metric_score(task, labels, baseline)

    name_rank = {name: rank for rank, name in enumerate(sorted(feature_names))}
    n = dataset.n_rows
    raw_drop = {}
    for pos, name in enumerate(feature_names):
        j = name_rank[name]
        scores = []
        for r in range(repeats):
            perm = np.random.RandomState(seed + 31 * j + r).permutation(n)
            shuffled = [list(row) for row in rows]
            column = [rows[i][pos] for i in range(n)]
            for i in range(n):
                shuffled[i][pos] = column[perm[i]]
            preds = adapter.predict(feature_names, shuffled, task, classes)
            if preds.n_rows != n:
                raise ValueError(f"adapter returned {preds.n_rows} rows, expected {n}")
            scores.append(_metric_score(task, labels, preds))
        raw_drop[name] = baseline_score - sum(scores) / repeats

    total = sum(max(d, 0.0) for d in raw_drop.values())
    if total > 0:
        normalized = {name: max(d, 0.0) / total for name, d in raw_drop.items()}
    else:
        normalized = {name: 0.0 for name in raw_drop}
    return ImportanceReport(
        raw_drop=raw_drop,
        normalized=normalized,
        repeats=repeats,
        seed=seed,
        metric_name=metric_name,
        baseline_score=baseline_score,
    )
