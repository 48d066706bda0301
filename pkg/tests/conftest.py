"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import csv
import io

import pytest

from tabcheck.adapter import Predictions
from tabcheck.dataset import Column, Dataset, Task


def make_dataset(columns: dict, label=None, task=None, features=None, meta=None) -> Dataset:
    """Build a Dataset from {name: [cells]} with inferred column types."""
    cols = [Column.build(name, cells) for name, cells in columns.items()]
    return Dataset(cols, label_name=label, feature_names=features, task=task, meta=meta)


def write_csv(path, header, rows) -> str:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return str(path)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


class StubAdapter:
    """In-process stand-in for a predict command: calls ``fn(row) -> label``.

    Duck-types PredictAdapter.predict so kernels and checks can be exercised
    without spawning processes. Records every batch it sees.
    """

    def __init__(self, fn, task=Task.CLASSIFICATION, probabilities=False):
        self.fn = fn
        self.task = task
        self.probabilities = probabilities
        self.batches = []

    def predict(self, feature_names, rows, task, classes=None):
        self.batches.append([list(r) for r in rows])
        predicted = tuple(self.fn(feature_names, row) for row in rows)
        probs = None
        if task is Task.CLASSIFICATION and self.probabilities:
            index = {c: i for i, c in enumerate(classes)}
            probs = tuple(
                tuple(1.0 if index[p] == i else 0.0 for i in range(len(classes)))
                for p in predicted
            )
        return Predictions(
            task=task,
            predicted=predicted,
            probabilities=probs,
            classes=tuple(classes) if task is Task.CLASSIFICATION else None,
        )


def threshold_stub(feature: str, threshold: float, classes=("a", "b"), probabilities=False):
    """Stub predicting classes[1] when feature > threshold, else classes[0]."""

    def fn(feature_names, row):
        i = feature_names.index(feature)
        v = row[i]
        try:
            x = float(v)
        except (TypeError, ValueError):
            return classes[0]
        return classes[1] if x > threshold else classes[0]

    return StubAdapter(fn, probabilities=probabilities)


@pytest.fixture
def adapter_script(tmp_path):
    """Write a Python predict-command script; returns its command prefix."""

    def build(body: str, name: str = "adapter.py"):
        path = tmp_path / name
        path.write_text(
            "import csv, os, sys\n"
            "rows = list(csv.reader(sys.stdin))\n"
            "header, data = rows[0], rows[1:]\n"
            "task = os.environ.get('DEEPCHECKS_TASK', '')\n"
            "classes = os.environ.get('DEEPCHECKS_CLASSES', '').split(',') if os.environ.get('DEEPCHECKS_CLASSES') else []\n"
            "out = csv.writer(sys.stdout, lineterminator='\\n')\n"
            + body,
            encoding="utf-8",
        )
        return ("python3", str(path))

    return build
