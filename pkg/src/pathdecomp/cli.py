"""Command-line front end.

One subcommand per experiment family; every run loads a YAML config,
applies `--set` overrides, executes, and writes a report.  Exit codes:
0 when all gates pass, 2 on gate failure, 1 on configuration or runtime
error.
"""

from __future__ import annotations

import argparse
import os
import sys

import yaml

from .config import apply_overrides, build_config
from .errors import ConfigError
from .experiments import run_experiment
from .report import emit_report

SUBCOMMAND_EXPERIMENTS = {
    "verify": {"resolution-identity", "pdx-position", "pdx-same-side",
               "pdx-generalized", "pdx-momentum"},
    "sweep": {"zeno-convergence"},
    "crossing": {"crossing-distribution"},
    "oracle": {"oracle-suite"},
}

OUTPUT_DIR_ENV = "PATHDECOMP_OUT"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathdecomp",
        description="Verification suites for propagator decompositions "
        "across dividing surfaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, experiments in SUBCOMMAND_EXPERIMENTS.items():
        p = sub.add_parser(name, help=f"run one of: {', '.join(sorted(experiments))}")
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config entry, dotted path (repeatable)",
        )
        p.add_argument("--threads", type=int, default=1,
                       help="concurrency budget (results are order-fixed)")
        p.add_argument("--output-dir", default=None,
                       help=f"report directory (overrides config and ${OUTPUT_DIR_ENV})")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as handle:
            raw = yaml.safe_load(handle) or {}
        raw = apply_overrides(raw, args.overrides)
        config = build_config(raw)
    except ConfigError as exc:
        for message in exc.messages:
            print(f"config error: {message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    allowed = SUBCOMMAND_EXPERIMENTS[args.command]
    if config.experiment not in allowed:
        print(
            f"error: experiment {config.experiment!r} does not belong to "
            f"'{args.command}' (expected one of {', '.join(sorted(allowed))})",
            file=sys.stderr,
        )
        return 1

    out_dir = (
        args.output_dir
        or os.environ.get(OUTPUT_DIR_ENV)
        or config.output_dir
    )
    try:
        report = run_experiment(config)
        written = emit_report(report, out_dir, config.output_formats)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    for gate in report.gates:
        status = "PASS" if gate.passed else "FAIL"
        if gate.comparator == "bool":
            detail = ""
        else:
            detail = f"  value={gate.value:.6e} {gate.comparator} {gate.threshold:.6e}"
        print(f"[{status}] {gate.name}{detail}")
    for path in written:
        print(f"wrote {path}")
    return 0 if report.all_passed else 2


if __name__ == "__main__":
    sys.exit(main())
