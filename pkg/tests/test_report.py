"""Verification-report assembly, JSON/CSV emission and schema conformance."""

import json

import jsonschema
import numpy as np
import pytest

from pathdecomp.errors import DomainError
from pathdecomp.report import (
    REPORT_SCHEMA,
    Gate,
    Table,
    VerificationReport,
    emit_report,
    format_csv,
    parse_csv,
)


def _sample_report():
    report = VerificationReport("demo", {"model": {"mass": 1.0}})
    report.gates.append(
        Gate.check("residual", "decomposition closes", np.float64(1e-3), 5e-2)
    )
    report.gates.append(Gate.boolean("sign stable", "orientation", np.bool_(True)))
    report.tables["sweep"] = Table(
        ["k", "error"], [[np.int64(8), np.float64(0.1)], [16, 0.025]]
    )
    report.scalars["lhs_abs"] = np.float64(0.42)
    report.finish()
    return report


def test_gate_check_comparators():
    assert Gate.check("a", "c", 1.0, 2.0).passed
    assert not Gate.check("a", "c", 3.0, 2.0).passed
    assert Gate.check("a", "c", 3.0, 2.0, comparator=">=").passed
    with pytest.raises(DomainError):
        Gate.check("a", "c", 1.0, 2.0, comparator="==")


def test_gate_boolean():
    gate = Gate.boolean("flag", "criterion", 1)
    assert gate.passed is True
    assert gate.value is None and gate.threshold is None


def test_all_passed_aggregation():
    report = _sample_report()
    assert report.all_passed
    report.gates.append(Gate.check("bad", "c", 10.0, 1.0))
    assert not report.all_passed


def test_payload_is_plain_json_and_schema_valid():
    report = _sample_report()
    text = report.to_json()  # would raise if numpy types survived
    doc = json.loads(text)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["gates"][0]["passed"] is True
    assert isinstance(doc["tables"]["sweep"]["rows"][0][0], int)
    assert doc["scalars"]["lhs_abs"] == pytest.approx(0.42)


def test_payload_is_deterministic():
    a = _sample_report().payload()
    b = _sample_report().payload()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_emit_refuses_empty_report(tmp_path):
    empty = VerificationReport("demo", {})
    with pytest.raises(DomainError, match="empty report"):
        emit_report(empty, tmp_path, ["json"])


def test_emit_rejects_unknown_format(tmp_path):
    with pytest.raises(DomainError, match="unknown report format"):
        emit_report(_sample_report(), tmp_path, ["parquet"])


def test_emit_writes_requested_files(tmp_path):
    written = emit_report(_sample_report(), tmp_path, ["json", "csv_bundle"])
    names = sorted(p.name for p in written)
    assert names == ["demo.json", "demo_sweep.csv"]
    doc = json.loads((tmp_path / "demo.json").read_text())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert "runtime_seconds" in doc["metadata"]


def test_csv_round_trip():
    table = Table(["k", "error", "label"],
                  [[8, 0.1, "coarse"], [16, None, "fine"]])
    recovered = parse_csv(format_csv(table))
    assert recovered.columns == table.columns
    assert recovered.rows[0] == [8, 0.1, "coarse"]
    assert recovered.rows[1] == [16, None, "fine"]


def test_csv_floats_round_trip_exactly():
    value = 1.0 / 3.0
    table = Table(["v"], [[value]])
    recovered = parse_csv(format_csv(table))
    assert recovered.rows[0][0] == value  # repr() keeps full precision
