"""Acceptance suite.

Each test pins one acceptance criterion at its stated tolerance and prints
one PASS/FAIL line (run with ``pytest -s tests/test_acceptance.py`` to see
them inline).
"""

from __future__ import annotations

import itertools
import json
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from tabcheck.adapter import PredictAdapter, permutation_importance, predict_via_command
from tabcheck.checks import DuplicatesCheck, FeatureDriftCheck
from tabcheck.cli import cli_main, exit_code_for
from tabcheck.dataset import Column, Task
from tabcheck.framework import (
    Category,
    Check,
    CheckContext,
    CheckStatus,
    ConditionResult,
    ConditionStatus,
    RunMeta,
    Suite,
    SuiteEntry,
    SuiteEntryResult,
    SuiteResult,
    evaluate_conditions,
    run_check,
    run_suite,
    summarize,
)
from tabcheck.kernels import Histogram, compute_metrics, emd_normalized, pps, psi
from tabcheck.suites import builtin_suites

from conftest import make_dataset, threshold_stub, write_csv
from test_distances import transport_lp
from test_metrics import oracle_binary_metrics

ADAPTER_DIST = Path(__file__).resolve().parent.parent / "adapter" / "dist" / "main.js"


@contextmanager
def criterion(name: str):
    started = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] {name}: FAIL ({time.monotonic() - started:.2f}s)")
        raise
    else:
        print(f"[ACCEPTANCE] {name}: PASS ({time.monotonic() - started:.2f}s)")


def test_duplicates_fidelity():
    with criterion("duplicates-fidelity"):
        started = time.monotonic()
        base = [[str(i), str((i * 13) % 17)] for i in range(100)]
        rows = base + base[:7]  # exactly 7 duplicated rows of 107
        ds = make_dataset({"a": [r[0] for r in rows], "b": [r[1] for r in rows]})
        check = DuplicatesCheck()
        result = run_check(check, CheckContext(train=ds))
        (cond,) = evaluate_conditions(result, check.default_conditions())
        assert abs(result.value - 7 / 107) <= 1e-9
        assert abs(result.value - 0.06542) <= 5e-6
        assert cond.status is ConditionStatus.FAIL
        assert "6.54%" in cond.details
        assert time.monotonic() - started < 1.0


def test_psi_oracle():
    with criterion("psi-oracle"):
        p = Histogram(("a", "b"), (0.5, 0.5))
        q = Histogram(("a", "b"), (0.9, 0.1))
        assert abs(psi(p, q).value - 0.87889) <= 1e-5
        rng = np.random.RandomState(202)
        for _ in range(1000):
            k = rng.randint(2, 12)
            labels = tuple(f"c{i}" for i in range(k))
            a = Histogram(labels, tuple(rng.dirichlet(np.ones(k))))
            b = Histogram(labels, tuple(rng.dirichlet(np.ones(k))))
            assert abs(psi(a, b).value - psi(b, a).value) <= 1e-9
            assert abs(psi(a, a).value) <= 1e-9


def test_emd_oracle():
    with criterion("emd-oracle"):
        rng = np.random.RandomState(303)
        for _ in range(200):
            a = rng.uniform(-10, 10, size=rng.randint(1, 13))
            b = rng.uniform(-10, 10, size=rng.randint(1, 13))
            assert abs(emd_normalized(a, b).value - transport_lp(a, b)) <= 1e-9
        sample = rng.normal(size=50)
        assert emd_normalized(sample, sample).value == 0.0


def test_drift_detection_power():
    with criterion("drift-detection-power"):
        started = time.monotonic()
        check = FeatureDriftCheck()
        for seed in range(20):
            rng = np.random.RandomState(seed)
            sigma = rng.uniform(0.5, 2.0)
            base = rng.normal(scale=sigma, size=1000)
            same = rng.normal(scale=sigma, size=1000)
            shifted = rng.normal(loc=2.0 * sigma, scale=sigma, size=1000)

            def ctx(test_values):
                return CheckContext(
                    train=make_dataset({"x": [f"{v:.9f}" for v in base]}),
                    test=make_dataset({"x": [f"{v:.9f}" for v in test_values]}),
                )

            shifted_result = run_check(check, ctx(shifted))
            (shifted_cond,) = evaluate_conditions(shifted_result, check.default_conditions())
            assert shifted_cond.status is ConditionStatus.FAIL, f"seed {seed}: shift missed"

            same_result = run_check(check, ctx(same))
            (same_cond,) = evaluate_conditions(same_result, check.default_conditions())
            assert same_cond.status is ConditionStatus.PASS, f"seed {seed}: false alarm"
        assert time.monotonic() - started < 5.0


def test_pps_sanity():
    with criterion("pps-sanity"):
        labels = ["u", "v"] * 500
        copy_score = pps(
            Column.build("f", list(labels)), Column.build("y", list(labels)), Task.CLASSIFICATION
        )
        assert copy_score.value == 1.0

        # independent noise, 10 seeds; constructions avoid the balanced-binary
        # weighted-F1 artifact inherent in the majority-baseline normalization
        for seed in range(10):
            rng = np.random.RandomState(seed)
            feature = Column.build("f", [f"{v:.9f}" for v in rng.uniform(size=1000)])
            reg_label = Column.build("y", [f"{v:.9f}" for v in rng.uniform(size=1000)])
            assert pps(feature, reg_label, Task.REGRESSION).value <= 0.05, f"seed {seed}"
            cls_label = Column.build("y", ["a" if v < 0.7 else "b" for v in rng.uniform(size=1000)])
            assert pps(feature, cls_label, Task.CLASSIFICATION).value <= 0.05, f"seed {seed}"


def test_permutation_importance_ordering():
    with criterion("permutation-importance-ordering"):
        started = time.monotonic()
        rng = np.random.RandomState(505)
        n = 400
        x1 = rng.uniform(-1, 1, size=n)
        ds = make_dataset(
            {
                "f1": [f"{v:.9f}" for v in x1],
                "n1": [f"{v:.9f}" for v in rng.uniform(-1, 1, size=n)],
                "n2": [f"{v:.9f}" for v in rng.uniform(-1, 1, size=n)],
                "n3": [f"{v:.9f}" for v in rng.uniform(-1, 1, size=n)],
                "y": ["b" if v > 0 else "a" for v in x1],
            },
            label="y",
        )
        report = permutation_importance(threshold_stub("f1", 0.0), ds, repeats=5, seed=42)
        assert report.normalized["f1"] > 0.9
        for noise in ("n1", "n2", "n3"):
            assert report.normalized[noise] < 0.05, noise
        assert time.monotonic() - started < 10.0


def test_metrics_micro_oracle():
    with criterion("metrics-micro-oracle"):
        for y_true in itertools.product("01", repeat=2):
            for y_pred in itertools.product("01", repeat=2):
                ours = compute_metrics(Task.CLASSIFICATION, list(y_true), list(y_pred))
                acc, macro, f1s = oracle_binary_metrics(list(y_true), list(y_pred))
                assert ours.accuracy == acc
                assert ours.macro_f1 == macro
                for c, f1 in f1s.items():
                    assert ours.per_class[c]["f1"] == f1


def _strip_timestamps(raw: bytes) -> bytes:
    doc = json.loads(raw)
    doc["meta"]["started_at"] = ""
    doc["meta"]["finished_at"] = ""
    return json.dumps(doc, indent=2, ensure_ascii=False).encode()


def test_suite_determinism_and_ci_contract(tmp_path):
    with criterion("suite-determinism-ci-contract"):
        started = time.monotonic()
        rng = np.random.RandomState(606)

        def rows(n, shift=0.0):
            out = []
            for _ in range(n):
                x1, x2 = rng.normal(loc=shift), rng.normal()
                label = "pos" if x1 + x2 + rng.normal(scale=1.5) > 0 else "neg"
                out.append([f"{x1:.6f}", f"{x2:.6f}", label])
            return out

        train = write_csv(tmp_path / "train.csv", ["x1", "x2", "y"], rows(1000))
        test = write_csv(tmp_path / "test.csv", ["x1", "x2", "y"], rows(1000))
        outputs = []
        for name in ("one.json", "two.json"):
            out = tmp_path / name
            code = cli_main([
                "run", "--suite", "train_test_validation",
                "--train", train, "--test", test, "--label", "y",
                "--seed", "7", "--output-json", str(out),
            ])
            assert code in (0, 1)
            outputs.append(out.read_bytes())
        assert _strip_timestamps(outputs[0]) == _strip_timestamps(outputs[1])

        # exit-code contract over the enumerable status matrix
        def synthetic(status, conds):
            value = 1 if status is CheckStatus.RAN else None
            message = None if status is CheckStatus.RAN else "m"
            from tabcheck.framework import CheckResult

            entry = SuiteEntryResult(
                CheckResult("s", Category.INTEGRITY, value, [], status, message),
                [ConditionResult("c", c, "") for c in conds],
            )
            return SuiteResult("m", [entry], summarize([entry]), RunMeta())

        matrix = [
            (CheckStatus.RAN, (), 0, 0),
            (CheckStatus.RAN, (ConditionStatus.PASS,), 0, 0),
            (CheckStatus.RAN, (ConditionStatus.WARNING,), 0, 1),
            (CheckStatus.RAN, (ConditionStatus.FAIL,), 1, 1),
            (CheckStatus.RAN, (ConditionStatus.FAIL, ConditionStatus.WARNING), 1, 1),
            (CheckStatus.SKIPPED, (ConditionStatus.WARNING,), 0, 1),
            (CheckStatus.SKIPPED, (), 0, 0),
            (CheckStatus.ERRORED, (ConditionStatus.WARNING,), 2, 2),
        ]
        for status, conds, plain, strict in matrix:
            result = synthetic(status, conds)
            assert exit_code_for(result, strict=False) == plain, (status, conds)
            assert exit_code_for(result, strict=True) == strict, (status, conds)
        assert time.monotonic() - started < 10.0


class _ThrowingCheck(Check):
    check_id = "throwing_stub"
    category = Category.INTEGRITY

    def run(self, ctx):
        raise RuntimeError("deliberate acceptance fault")


def test_framework_isolation():
    with criterion("framework-isolation"):
        ds = make_dataset({"a": [str(i) for i in range(30)], "y": ["u", "v"] * 15}, label="y")
        suite = builtin_suites()["data_integrity"]
        sabotaged = Suite("sabotaged", [SuiteEntry(_ThrowingCheck(), [])] + list(suite.entries))
        result = run_suite(sabotaged, CheckContext(train=ds))
        assert result.entries[0].result.status is CheckStatus.ERRORED
        assert "deliberate acceptance fault" in result.entries[0].result.message
        for entry in result.entries[1:]:
            assert entry.result.status is CheckStatus.RAN, entry.result.check_id
        assert exit_code_for(result) == 2


# -- secondary component: reference adapter over the wire protocol -----------


def _adapter_command(tmp_path, mode: str, **config) -> tuple:
    assert ADAPTER_DIST.exists(), (
        f"reference adapter not built at {ADAPTER_DIST}; run `npm run build` in adapter/"
    )
    config_path = tmp_path / f"{mode}-config.json"
    config_path.write_text(json.dumps({"mode": mode, **config}), encoding="utf-8")
    return ("node", str(ADAPTER_DIST), str(config_path))


def test_wire_contract_round_trip(tmp_path):
    with criterion("wire-contract-round-trip"):
        rng = np.random.RandomState(707)
        train_csv = write_csv(
            tmp_path / "train.csv",
            ["f1", "f2", "y"],
            [[f"{rng.normal():.6f}", f"{rng.normal():.6f}", rng.choice(["a", "b"])] for _ in range(50)],
        )

        # row alignment for 1, 100 and 10^4 rows through the prior-mode adapter
        prior_cmd = _adapter_command(tmp_path, "prior", train_csv=str(train_csv), label="y")
        adapter = PredictAdapter(prior_cmd)
        for n in (1, 100, 10_000):
            rows = [[f"{i}.5", f"{-i}.25"] for i in range(n)]
            preds = predict_via_command(adapter, ["f1", "f2"], rows, Task.CLASSIFICATION, ["a", "b"])
            assert preds.n_rows == n
            assert set(preds.predicted) <= {"a", "b"}
            assert len(set(preds.predicted)) == 1  # prior mode is constant

        # permutation importance through the threshold-mode adapter matches
        # the in-process stub computation exactly
        n = 200
        x1 = rng.uniform(-1, 1, size=n)
        ds = make_dataset(
            {
                "f1": [f"{v:.9f}" for v in x1],
                "f2": [f"{v:.9f}" for v in rng.uniform(-1, 1, size=n)],
                "f3": [f"{v:.9f}" for v in rng.uniform(-1, 1, size=n)],
                "y": ["b" if v > 0 else "a" for v in x1],
            },
            label="y",
        )
        threshold_cmd = _adapter_command(tmp_path, "threshold", feature="f1", threshold=0.0)
        via_wire = permutation_importance(
            PredictAdapter(threshold_cmd), ds, repeats=3, seed=11
        )
        in_process = permutation_importance(threshold_stub("f1", 0.0), ds, repeats=3, seed=11)
        for name in ds.feature_names:
            assert abs(via_wire.raw_drop[name] - in_process.raw_drop[name]) <= 1e-9, name
