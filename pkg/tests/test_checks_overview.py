"""Dataset summary check."""

from __future__ import annotations

from tabcheck.dataset import SchemaOptions, load_csv
from tabcheck.checks import DatasetSummaryCheck
from tabcheck.framework import CheckContext, CheckStatus, run_check

from conftest import make_dataset, write_csv


def test_roles_and_types_reported():
    ds = make_dataset(
        {"age": [str(i) for i in range(40)], "city": ["ny", "sf"] * 20, "y": ["u", "v"] * 20},
        label="y",
    )
    result = run_check(DatasetSummaryCheck(), CheckContext(train=ds))
    assert result.status is CheckStatus.RAN
    by_col = {r["column"]: r for r in result.value}
    assert by_col["age"]["role"] == "feature"
    assert by_col["age"]["type"] == "numeric"
    assert by_col["age"]["min"] == 0.0 and by_col["age"]["max"] == 39.0
    assert by_col["city"]["top_categories"] == ["ny", "sf"]
    assert by_col["y"]["role"] == "label"


def test_mixed_column_surfaced():
    cells = [str(i) for i in range(99)] + ["x"]
    ds = make_dataset({"m": cells})
    result = run_check(DatasetSummaryCheck(), CheckContext(train=ds))
    assert result.value[0]["type"] == "mixed"


def test_sampling_noted(tmp_path):
    path = write_csv(tmp_path / "big.csv", ["a"], [[str(i)] for i in range(300)])
    ds = load_csv(path, SchemaOptions(max_rows=100))
    result = run_check(DatasetSummaryCheck(), CheckContext(train=ds))
    assert "sampled" in result.message
    assert "300" in result.message


def test_missing_fraction_counted():
    ds = make_dataset({"a": ["1", "", "3", ""]})
    result = run_check(DatasetSummaryCheck(), CheckContext(train=ds))
    assert result.value[0]["missing_fraction"] == 0.5
