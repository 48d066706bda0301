"""Command-line interface.

Exit codes: 0 = no failing condition (warnings allowed unless --strict),
1 = at least one condition failed (or warned, under --strict), 2 = a check
errored, 3 = usage or IO error. Precedence: 3 > 2 > 1 > 0. Standard output
carries only the check listing and terse summaries; diagnostics go to
standard error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from tabcheck.adapter import PredictAdapter, load_predictions_csv
from tabcheck.checks import CHECKS
from tabcheck.dataset import LoadError, SchemaOptions, Task, load_csv
from tabcheck.framework import (
    CheckContext,
    CheckStatus,
    ConditionStatus,
    SuiteResult,
    run_suite,
)
from tabcheck.htmlreport import render_html
from tabcheck.report import render_json
from tabcheck.suites import (
    BUILTIN_SUITE_IDS,
    SuiteSpecError,
    builtin_suites,
    single_check_suite,
    suite_from_spec,
    validate_config_keys,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERRORED = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); the contract wants 3
        raise UsageError(message)


def _add_data_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--train", required=True, help="training/reference CSV file")
    parser.add_argument("--test", help="test/current CSV file")
    parser.add_argument("--label", help="label column name")
    parser.add_argument("--features", help="comma-separated feature columns (default: all non-label)")
    parser.add_argument("--task", choices=["classification", "regression"], help="task override")
    parser.add_argument("--predictions-train", help="prediction CSV for the train dataset")
    parser.add_argument("--predictions-test", help="prediction CSV for the test dataset")
    parser.add_argument("--predict-cmd", help="external prediction command (stdin/stdout CSV protocol)")
    parser.add_argument("--config", help="JSON config file (checks.<id>.<param> overrides, custom suite)")
    parser.add_argument("--output-html", help="write a self-contained HTML report here")
    parser.add_argument("--output-json", help="write the JSON report here")
    parser.add_argument("--seed", type=int, default=42, help="seed for seeded procedures (default 42)")
    parser.add_argument("--strict", action="store_true", help="treat condition warnings as failures")


def build_parser() -> _Parser:
    parser = _Parser(prog="tabcheck", description="Validation suites for tabular ML data and predictions.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a suite")
    run_p.add_argument("--suite", required=True, help="built-in suite name or a JSON suite file")
    _add_data_flags(run_p)

    check_p = sub.add_parser("check", help="run a single check")
    check_p.add_argument("check_id", help="check id (see list-checks)")
    _add_data_flags(check_p)

    sub.add_parser("list-checks", help="print the check catalog")
    return parser


def load_config(path: str) -> dict:
    """Load and validate a JSON config file; returns the flat key map."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config '{path}': {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config '{path}' is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise UsageError(f"config '{path}' must be a JSON object")
    try:
        validate_config_keys(config)
    except SuiteSpecError as exc:
        raise UsageError(str(exc)) from exc
    return config


def _resolve_suite(name_or_file: str, config: dict):
    if name_or_file in BUILTIN_SUITE_IDS:
        return builtin_suites(config)[name_or_file]
    custom = config.get("suite")
    if isinstance(custom, dict) and custom.get("name") == name_or_file:
        return suite_from_spec(custom, config)
    if os.path.exists(name_or_file):
        try:
            with open(name_or_file, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read suite file '{name_or_file}': {exc}") from exc
        if not isinstance(doc, dict) or "suite" not in doc:
            raise UsageError(f"suite file '{name_or_file}' must contain a top-level 'suite' object")
        return suite_from_spec(doc["suite"], config)
    raise UsageError(
        f"unknown suite '{name_or_file}' (built-in: {', '.join(sorted(BUILTIN_SUITE_IDS))}; "
        "or pass a JSON suite file, or the name of a suite defined in --config)"
    )


def _build_context(args, config: dict) -> CheckContext:
    task = Task(args.task) if args.task else None
    features = [f.strip() for f in args.features.split(",")] if args.features else None
    opts = SchemaOptions(label=args.label, features=features, task=task, sample_seed=args.seed)
    train = load_csv(args.train, opts)
    test = load_csv(args.test, opts) if args.test else None

    classes = None
    pred_task: Optional[Task] = None
    for ds in (train, test):
        if ds is not None and ds.task is not Task.UNLABELED:
            pred_task = pred_task or ds.task
    if pred_task is Task.CLASSIFICATION:
        values: set = set()
        for ds in (train, test):
            if ds is not None and ds.label is not None:
                values.update(v for v in ds.label.values if v is not None)
        classes = tuple(sorted(values))

    def load_preds(path):
        if pred_task is None:
            raise UsageError("prediction files require a labeled dataset to establish the task")
        try:
            return load_predictions_csv(path, pred_task, classes)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    predictions_train = load_preds(args.predictions_train) if args.predictions_train else None
    predictions_test = load_preds(args.predictions_test) if args.predictions_test else None
    adapter = PredictAdapter.from_string(args.predict_cmd) if args.predict_cmd else None

    return CheckContext(
        train=train,
        test=test,
        predictions_train=predictions_train,
        predictions_test=predictions_test,
        adapter=adapter,
        config=config,
        seed=args.seed,
    )


def exit_code_for(result: SuiteResult, strict: bool = False) -> int:
    """The CI exit code implied by a suite result."""
    if any(e.result.status is CheckStatus.ERRORED for e in result.entries):
        return EXIT_ERRORED
    conditions = [c for e in result.entries for c in e.condition_results]
    if any(c.status is ConditionStatus.FAIL for c in conditions):
        return EXIT_FAILED
    if strict and any(c.status is ConditionStatus.WARNING for c in conditions):
        return EXIT_FAILED
    return EXIT_OK


def _write_outputs(result: SuiteResult, args) -> None:
    if args.output_json:
        with open(args.output_json, "wb") as fh:
            fh.write(render_json(result))
    if args.output_html:
        with open(args.output_html, "wb") as fh:
            fh.write(render_html(result))


def _summary_line(result: SuiteResult) -> str:
    s = result.summary
    return (
        f"suite '{result.suite_name}': {len(result.entries)} checks — "
        f"{s['passed']} passed, {s['failed']} failed, {s['warned']} warned, "
        f"{s['skipped']} skipped, {s['errored']} errored"
    )


def _run_and_report(suite, args, config: dict) -> int:
    ctx = _build_context(args, config)
    result = run_suite(suite, ctx)
    _write_outputs(result, args)
    print(_summary_line(result))
    return exit_code_for(result, strict=args.strict)


def _list_checks() -> None:
    width = max(len(cid) for cid in CHECKS)
    for cid, cls in CHECKS.items():
        params = ", ".join(
            f"{name}={spec.default!r}" for name, spec in cls.param_specs.items()
        ) or "(no params)"
        print(f"{cid:<{width}}  {cls.category.value:<12}  {params}")


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "list-checks":
            _list_checks()
            return EXIT_OK
        config = load_config(args.config) if args.config else {}
        if args.command == "run":
            suite = _resolve_suite(args.suite, config)
        else:
            if args.check_id not in CHECKS:
                raise UsageError(
                    f"unknown check '{args.check_id}' (see 'tabcheck list-checks')"
                )
            suite = single_check_suite(args.check_id, config)
        return _run_and_report(suite, args, config)
    except (UsageError, SuiteSpecError, LoadError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
