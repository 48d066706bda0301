"""Typed, immutable tabular datasets loaded from CSV files.

Cells are kept as raw text; numeric columns additionally expose a parsed
float view. A cell is missing when it is empty or one of the literal
markers ``NaN`` / ``null`` (case-sensitive).
"""

from __future__ import annotations

import csv
import hashlib
import math
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

MISSING_MARKERS = frozenset({"", "NaN", "null"})

# Distinct-value thresholds below which an all-numeric column is treated as
# encoded categories rather than a measurement.
LOW_CARDINALITY_MAX_DISTINCT = 10
LOW_CARDINALITY_MAX_RATIO = 0.05

# Strict decimal syntax: integer / decimal / scientific. No comma decimal
# separators, no "inf"/"nan", no underscores, no surrounding whitespace.
_NUMBER_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class ColumnType(Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"
    MIXED = "mixed"


class Task(Enum):
    CLASSIFICATION = "classification"
    REGRESSION = "regression"
    UNLABELED = "unlabeled"


class LoadError(ValueError):
    """A CSV file or schema option violates the loading contract."""


def is_missing(cell: Optional[str]) -> bool:
    return cell is None or cell in MISSING_MARKERS


def parse_number(cell: str) -> Optional[float]:
    """Parse a cell as a finite decimal number, or return None."""
    if not _NUMBER_RE.fullmatch(cell):
        return None
    value = float(cell)
    if not math.isfinite(value):
        return None
    return value


def infer_column_type(cells: Sequence[Optional[str]]) -> ColumnType:
    """Infer the logical type of a column from its raw cells.

    Numeric when every non-missing cell parses as a finite decimal number,
    Categorical when none do, Mixed otherwise. A numeric column with at most
    10 distinct values covering at most 5% of its non-missing cells is
    re-labeled Categorical (encoded categories). An all-missing column is
    Categorical; the loader records a warning for it.
    """
    if len(cells) == 0:
        raise ValueError("cannot infer the type of an empty column")
    n_values = 0
    n_numbers = 0
    distinct_numbers: set[float] = set()
    for cell in cells:
        if is_missing(cell):
            continue
        n_values += 1
        number = parse_number(cell)
        if number is not None:
            n_numbers += 1
            distinct_numbers.add(number)
    if n_values == 0:
        return ColumnType.CATEGORICAL
    if n_numbers == n_values:
        if (
            len(distinct_numbers) <= LOW_CARDINALITY_MAX_DISTINCT
            and len(distinct_numbers) / n_values <= LOW_CARDINALITY_MAX_RATIO
        ):
            return ColumnType.CATEGORICAL
        return ColumnType.NUMERIC
    if n_numbers == 0:
        return ColumnType.CATEGORICAL
    return ColumnType.MIXED


@dataclass(eq=False)
class Column:
    """One named column: raw cells (None = missing) plus a logical type."""

    name: str
    ctype: ColumnType
    values: tuple
    n_missing: int

    @classmethod
    def build(cls, name: str, cells: Iterable[Optional[str]], ctype: Optional[ColumnType] = None) -> "Column":
        values = tuple(None if is_missing(c) else c for c in cells)
        if ctype is None:
            ctype = infer_column_type(values) if values else ColumnType.CATEGORICAL
        n_missing = sum(1 for v in values if v is None)
        return cls(name=name, ctype=ctype, values=values, n_missing=n_missing)

    def __len__(self) -> int:
        return len(self.values)

    @cached_property
    def numeric(self) -> np.ndarray:
        """Parsed float view; NaN where missing or non-parseable."""
        out = np.full(len(self.values), np.nan)
        for i, v in enumerate(self.values):
            if v is not None:
                number = parse_number(v)
                if number is not None:
                    out[i] = number
        out.setflags(write=False)
        return out

    def non_missing(self) -> list:
        return [v for v in self.values if v is not None]

    def distinct_count(self) -> int:
        return len(set(self.non_missing()))

    def retyped(self, ctype: ColumnType) -> "Column":
        return Column(name=self.name, ctype=ctype, values=self.values, n_missing=self.n_missing)


@dataclass(frozen=True)
class DatasetMeta:
    source: Optional[str] = None
    digest: Optional[str] = None
    n_source_rows: int = 0
    sampled: bool = False
    sample_seed: int = 42
    warnings: tuple = ()


@dataclass(frozen=True)
class SchemaOptions:
    """Options steering CSV loading and schema resolution."""

    label: Optional[str] = None
    features: Optional[Sequence[str]] = None
    task: Optional[Task] = None
    categorical_overrides: Sequence[str] = ()
    max_rows: int = 100_000
    sample_seed: int = 42

    def __post_init__(self) -> None:
        if self.max_rows < 1:
            raise LoadError("max_rows must be >= 1")


class Dataset:
    """Immutable typed table with an optional label column and a task kind.

    Columns have equal length and unique names; the label is never a
    feature. Classification coerces the label column to Categorical;
    regression requires a clean numeric label.
    """

    def __init__(
        self,
        columns: Sequence[Column],
        label_name: Optional[str] = None,
        feature_names: Optional[Sequence[str]] = None,
        task: Optional[Task] = None,
        meta: Optional[DatasetMeta] = None,
    ) -> None:
        columns = list(columns)
        names = [c.name for c in columns]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise LoadError(f"duplicate column names: {', '.join(dupes)}")
        lengths = {len(c) for c in columns}
        if len(lengths) > 1:
            raise LoadError(f"columns have unequal lengths: {sorted(lengths)}")
        by_name = {c.name: c for c in columns}

        if label_name is not None and label_name not in by_name:
            raise LoadError(f"label column '{label_name}' not found")
        if feature_names is None:
            feature_names = [n for n in names if n != label_name]
        feature_names = list(feature_names)
        for f in feature_names:
            if f not in by_name:
                raise LoadError(f"feature column '{f}' not found")
        if label_name is not None and label_name in feature_names:
            raise LoadError(f"label column '{label_name}' also listed as a feature")

        if task is None:
            if label_name is None:
                task = Task.UNLABELED
            elif by_name[label_name].ctype is ColumnType.NUMERIC:
                task = Task.REGRESSION
            else:
                task = Task.CLASSIFICATION
        if task is not Task.UNLABELED and label_name is None:
            raise LoadError(f"task {task.value} requires a label column")

        if label_name is not None:
            label = by_name[label_name]
            if task is Task.CLASSIFICATION and label.ctype is not ColumnType.CATEGORICAL:
                by_name[label_name] = label.retyped(ColumnType.CATEGORICAL)
            elif task is Task.REGRESSION:
                bad = [v for v in label.values if v is not None and parse_number(v) is None]
                if bad:
                    raise LoadError(
                        f"label column '{label_name}' has non-numeric cells "
                        f"(e.g. '{bad[0]}') but task is regression"
                    )
                if label.ctype is not ColumnType.NUMERIC:
                    by_name[label_name] = label.retyped(ColumnType.NUMERIC)

        self._columns = tuple(by_name[n] for n in names)
        self._by_name = {c.name: c for c in self._columns}
        self._feature_names = tuple(feature_names)
        self._label_name = label_name
        self._task = task
        self._meta = meta or DatasetMeta()

    @property
    def columns(self) -> tuple:
        return self._columns

    @property
    def feature_names(self) -> tuple:
        return self._feature_names

    @property
    def label_name(self) -> Optional[str]:
        return self._label_name

    @property
    def task(self) -> Task:
        return self._task

    @property
    def meta(self) -> DatasetMeta:
        return self._meta

    @property
    def n_rows(self) -> int:
        return len(self._columns[0]) if self._columns else 0

    def column(self, name: str) -> Column:
        return self._by_name[name]

    @property
    def label(self) -> Optional[Column]:
        return self._by_name[self._label_name] if self._label_name else None

    def feature_columns(self) -> list:
        return [self._by_name[n] for n in self._feature_names]

    def feature_rows(self) -> list:
        """Rows of raw feature cells, in feature order (None = missing)."""
        cols = [self._by_name[n].values for n in self._feature_names]
        return [list(row) for row in zip(*cols)] if cols else [[] for _ in range(self.n_rows)]


def canonical_csv_digest(data: bytes) -> str:
    """SHA-256 of CSV bytes with normalized line endings, trailing newline trimmed."""
    normalized = data.replace(b"\r\n", b"\n").replace(b"\r", b"\n").rstrip(b"\n")
    return hashlib.sha256(normalized).hexdigest()


def _sample_rows(rows: list, max_rows: int, seed: int) -> list:
    keep = np.random.RandomState(seed).permutation(len(rows))[:max_rows]
    keep.sort()
    return [rows[i] for i in keep]


def load_csv(path: str, opts: Optional[SchemaOptions] = None) -> Dataset:
    """Load a CSV file (RFC 4180, UTF-8, header row) into a Dataset.

    Oversized files are reduced to a deterministic uniform row sample of
    ``opts.max_rows`` rows; the sampling is recorded in the dataset metadata.
    """
    opts = opts or SchemaOptions()
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise LoadError(f"cannot read '{path}': {exc}") from exc
    digest = canonical_csv_digest(raw)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise LoadError(f"'{path}' is not valid UTF-8: {exc}") from exc

    reader = csv.reader(_split_csv_lines(text))
    try:
        header = next(reader)
    except StopIteration:
        raise LoadError(f"'{path}' is empty; a header row is required") from None
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise LoadError(f"duplicate header names in '{path}': {', '.join(dupes)}")

    rows = []
    for i, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise LoadError(
                f"'{path}' line {i}: expected {len(header)} fields, found {len(row)}"
            )
        rows.append(row)

    if opts.label is not None and opts.label not in header:
        raise LoadError(f"label column '{opts.label}' not found in '{path}' (columns: {', '.join(header)})")
    feature_names = list(opts.features) if opts.features is not None else [h for h in header if h != opts.label]
    for f in feature_names:
        if f not in header:
            raise LoadError(f"feature column '{f}' not found in '{path}'")

    n_source = len(rows)
    sampled = n_source > opts.max_rows
    if sampled:
        rows = _sample_rows(rows, opts.max_rows, opts.sample_seed)

    keep = [h for h in header if h in set(feature_names) | ({opts.label} if opts.label else set())]
    idx = {h: header.index(h) for h in keep}
    overrides = set(opts.categorical_overrides)
    warnings = []
    columns = []
    for name in keep:
        cells = [row[idx[name]] for row in rows]
        forced = ColumnType.CATEGORICAL if name in overrides else None
        col = Column.build(name, cells, ctype=forced)
        if col.n_missing == len(col) and len(col) > 0:
            warnings.append(f"column '{name}' has no non-missing values; typed categorical")
        columns.append(col)

    meta = DatasetMeta(
        source=str(path),
        digest=digest,
        n_source_rows=n_source,
        sampled=sampled,
        sample_seed=opts.sample_seed,
        warnings=tuple(warnings),
    )
    return Dataset(
        columns,
        label_name=opts.label,
        feature_names=feature_names,
        task=opts.task,
        meta=meta,
    )


def _split_csv_lines(text: str) -> list:
    # csv.reader wants an iterable of lines with newlines intact so quoted
    # newlines survive; splitlines(keepends=True) provides exactly that.
    return text.splitlines(keepends=True)


@dataclass(frozen=True)
class SchemaDiscrepancy:
    """One train/test schema difference: a datum, not an error."""

    kind: str  # missing_feature | type_mismatch | label_mismatch | task_mismatch
    name: str
    detail: str


def validate_shared_schema(train: Dataset, test: Dataset) -> list:
    """Compare two datasets' schemas; an empty list means comparable."""
    out = []
    train_feats = set(train.feature_names)
    test_feats = set(test.feature_names)
    for f in train.feature_names:
        if f not in test_feats:
            out.append(SchemaDiscrepancy("missing_feature", f, f"feature '{f}' missing from test dataset"))
    for f in test.feature_names:
        if f not in train_feats:
            out.append(SchemaDiscrepancy("missing_feature", f, f"feature '{f}' missing from train dataset"))
    for f in train.feature_names:
        if f in test_feats:
            a, b = train.column(f).ctype, test.column(f).ctype
            if a is not b:
                out.append(
                    SchemaDiscrepancy(
                        "type_mismatch", f, f"feature '{f}' is {a.value} in train but {b.value} in test"
                    )
                )
    if train.label_name != test.label_name:
        out.append(
            SchemaDiscrepancy(
                "label_mismatch",
                train.label_name or "(none)",
                f"label is '{train.label_name}' in train but '{test.label_name}' in test",
            )
        )
    if train.task is not test.task:
        out.append(
            SchemaDiscrepancy(
                "task_mismatch",
                train.task.value,
                f"task is {train.task.value} in train but {test.task.value} in test",
            )
        )
    return out
