"""Verification reports: assembly, JSON/CSV emission, schema.

Reports are self-contained: they echo the full effective configuration
and label every pass/fail gate with the invariant it instantiates.  The
numeric payload of a report is deterministic for a fixed configuration.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DomainError

FORMAT_VERSION = 1

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "pathdecomp verification report",
    "type": "object",
    "required": ["format_version", "experiment", "config", "gates", "tables"],
    "properties": {
        "format_version": {"type": "integer", "minimum": 1},
        "experiment": {"type": "string"},
        "config": {"type": "object"},
        "gates": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "criterion", "value", "threshold",
                             "comparator", "passed"],
                "properties": {
                    "name": {"type": "string"},
                    "criterion": {"type": "string"},
                    "value": {"type": ["number", "null"]},
                    "threshold": {"type": ["number", "null"]},
                    "comparator": {"type": "string", "enum": ["<=", ">=", "bool"]},
                    "passed": {"type": "boolean"},
                },
            },
        },
        "tables": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["columns", "rows"],
                "properties": {
                    "columns": {"type": "array", "items": {"type": "string"}},
                    "rows": {"type": "array", "items": {"type": "array"}},
                },
            },
        },
        "scalars": {"type": "object"},
        "metadata": {"type": "object"},
    },
}


def _plain(value):
    """Recursively convert numpy scalars/arrays to plain Python types."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item") and getattr(value, "ndim", 0) == 0:
        return value.item()
    if hasattr(value, "tolist"):
        return _plain(value.tolist())
    return value


@dataclass
class Gate:
    name: str
    criterion: str
    value: float | None
    threshold: float | None
    comparator: str = "<="
    passed: bool = False

    @classmethod
    def check(cls, name, criterion, value, threshold, comparator="<=") -> "Gate":
        value = float(value)
        threshold = float(threshold)
        if comparator == "<=":
            passed = value <= threshold
        elif comparator == ">=":
            passed = value >= threshold
        else:
            raise DomainError(f"unknown comparator {comparator!r}")
        return cls(name, criterion, value, threshold, comparator, passed)

    @classmethod
    def boolean(cls, name, criterion, passed) -> "Gate":
        return cls(name, criterion, None, None, "bool", bool(passed))


@dataclass
class Table:
    columns: list[str]
    rows: list[list]


@dataclass
class VerificationReport:
    experiment: str
    config: dict
    gates: list[Gate] = field(default_factory=list)
    tables: dict[str, Table] = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    started_at: float = field(default_factory=time.time)
    runtime_seconds: float = 0.0

    def finish(self):
        self.runtime_seconds = time.time() - self.started_at

    @property
    def all_passed(self) -> bool:
        return all(g.passed for g in self.gates)

    def payload(self) -> dict:
        """Deterministic numeric payload (no timing metadata)."""
        return _plain({
            "format_version": FORMAT_VERSION,
            "experiment": self.experiment,
            "config": self.config,
            "gates": [
                {
                    "name": g.name,
                    "criterion": g.criterion,
                    "value": g.value,
                    "threshold": g.threshold,
                    "comparator": g.comparator,
                    "passed": g.passed,
                }
                for g in self.gates
            ],
            "tables": {
                name: {"columns": t.columns, "rows": t.rows}
                for name, t in sorted(self.tables.items())
            },
            "scalars": dict(sorted(self.scalars.items())),
        })

    def to_json(self) -> str:
        doc = self.payload()
        doc["metadata"] = {"runtime_seconds": self.runtime_seconds}
        return json.dumps(doc, indent=2, sort_keys=True)


def emit_report(
    report: VerificationReport, out_dir: str | Path, formats: list[str]
) -> list[Path]:
    """Write the report; refuses to emit an empty (gate-less) report."""
    if not report.gates and not report.tables:
        raise DomainError(
            "refusing to emit an empty report: it contains no gates and no "
            "tables, so there is nothing to record"
        )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    stem = report.experiment
    for fmt in formats:
        if fmt == "json":
            path = out_dir / f"{stem}.json"
            path.write_text(report.to_json())
            written.append(path)
        elif fmt == "csv_bundle":
            for name, table in sorted(report.tables.items()):
                path = out_dir / f"{stem}_{name}.csv"
                path.write_text(format_csv(table))
                written.append(path)
        else:
            raise DomainError(f"unknown report format {fmt!r}")
    return written


def format_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow(["" if v is None else repr(v) if isinstance(v, float) else v
                         for v in row])
    return buf.getvalue()


def parse_csv(text: str) -> Table:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    columns, data = rows[0], rows[1:]

    def convert(cell: str):
        if cell == "":
            return None
        try:
            return int(cell)
        except ValueError:
            pass
        try:
            return float(cell)
        except ValueError:
            return cell

    return Table(columns, [[convert(c) for c in row] for row in data])
