import json
from dataclasses import fields

import pandas as pd
import pytest

from services.report_service import ReportService, ResultRow, TheoremCheckRow
from utils.exceptions import InvariantViolationError, ValidationError


RUN_CONFIG = {"scenario": "ghz", "n": 4, "pair": [0, 3]}


def _rows():
    return [
        ResultRow(scenario="ghz", i=0, j=3, distance=3, lower=1 / 3, le_estimate=0.5, le_method="constructive",
                  upper=0.75, xi_e=float("inf"), seed=1),
        ResultRow(scenario="ghz", i=1, j=2, error="ValidationError: par inválido"),
    ]


def _read_csv(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    comments = [line for line in lines if line.startswith("#")]
    frame = pd.read_csv(path, skiprows=len(comments), dtype=str, keep_default_na=False)
    return comments, frame


# -----------------------------------------------------------------------------
# Formatação
# -----------------------------------------------------------------------------
def test_format_value_rounds_to_twelve_significant_digits():
    assert ReportService.format_value(1 / 3) == 0.333333333333
    assert ReportService.format_value(float("inf")) == "inf"
    assert ReportService.format_value(None) is None
    assert ReportService.format_value(True) is True
    assert ReportService.format_value(7) == 7


# -----------------------------------------------------------------------------
# CSV
# -----------------------------------------------------------------------------
def test_csv_header_echoes_config(tmp_path):
    path = ReportService.write(_rows(), RUN_CONFIG, tmp_path / "out" / "ghz.csv", "csv")
    comments, _ = _read_csv(path)
    assert comments == ['# n=4', '# pair=[0, 3]', '# scenario="ghz"']


def test_csv_columns_follow_row_declaration(tmp_path):
    path = ReportService.write(_rows(), RUN_CONFIG, tmp_path / "ghz.csv", "csv")
    _, frame = _read_csv(path)
    assert list(frame.columns) == [f.name for f in fields(ResultRow)]
    assert len(frame) == 2


def test_csv_cells(tmp_path):
    path = ReportService.write(_rows(), RUN_CONFIG, tmp_path / "ghz.csv", "csv")
    _, frame = _read_csv(path)
    first = frame.iloc[0]
    assert first["lower"] == "0.333333333333"
    assert first["xi_e"] == "inf"
    assert first["note"] == ""
    assert first["le_method"] == "constructive"
    assert frame.iloc[1]["error"] == "ValidationError: par inválido"


def test_empty_csv_has_header_only(tmp_path):
    path = ReportService.write([], RUN_CONFIG, tmp_path / "empty.csv", "csv")
    _, frame = _read_csv(path)
    assert frame.empty
    assert "le_estimate" in frame.columns


# -----------------------------------------------------------------------------
# JSON
# -----------------------------------------------------------------------------
def test_json_document_structure(tmp_path):
    path = ReportService.write(_rows(), RUN_CONFIG, tmp_path / "ghz.json", "json")
    document = json.loads(path.read_text(encoding="utf-8"))
    assert document["config"] == RUN_CONFIG
    assert len(document["rows"]) == 2
    first = document["rows"][0]
    assert first["lower"] == 0.333333333333
    assert first["xi_e"] == "inf"
    assert first["note"] is None
    assert list(first) == [f.name for f in fields(ResultRow)]


def test_csv_and_json_carry_same_values(tmp_path):
    csv_path = ReportService.write(_rows(), RUN_CONFIG, tmp_path / "a.csv", "csv")
    json_path = ReportService.write(_rows(), RUN_CONFIG, tmp_path / "a.json", "json")
    _, frame = _read_csv(csv_path)
    document = json.loads(json_path.read_text(encoding="utf-8"))
    for column in ("lower", "le_estimate", "upper"):
        assert float(frame.iloc[0][column]) == document["rows"][0][column]


def test_theorem_rows_use_their_own_columns(tmp_path):
    row = TheoremCheckRow(scenario="theorem-check", ensemble="pure", rank=1, samples=10, violations=0,
                          min_gain=0.0, mean_gain=0.1)
    path = ReportService.write([row], {"scenario": "theorem-check"}, tmp_path / "t.csv", "csv")
    _, frame = _read_csv(path)
    assert list(frame.columns) == [f.name for f in fields(TheoremCheckRow)]
    assert frame.iloc[0]["violations"] == "0"


# -----------------------------------------------------------------------------
# Verificação
# -----------------------------------------------------------------------------
def test_violating_row_is_refused_before_writing(tmp_path):
    rows = [ResultRow(scenario="bounds", i=0, j=1, lower=0.6, le_estimate=0.5, upper=0.8)]
    target = tmp_path / "bad.csv"
    with pytest.raises(InvariantViolationError):
        ReportService.write(rows, RUN_CONFIG, target, "csv")
    assert not target.exists()


def test_sampled_rows_get_standard_error_slack():
    row = ResultRow(scenario="bounds", lower=0.5, le_estimate=0.48, upper=0.9, standard_error=0.01)
    assert not row.violates_sandwich()
    assert ResultRow(scenario="bounds", lower=0.5, le_estimate=0.48, upper=0.9).violates_sandwich()


def test_error_rows_are_not_checked():
    assert not ResultRow(scenario="bounds", lower=0.9, le_estimate=0.1, upper=1.0, error="x").violates_sandwich()


def test_unknown_format_raises(tmp_path):
    with pytest.raises(ValidationError) as info:
        ReportService.write(_rows(), RUN_CONFIG, tmp_path / "out.xml", "xml")
    assert info.value.field == "format"


# -----------------------------------------------------------------------------
# Resumo
# -----------------------------------------------------------------------------
def test_summary_counts(capsys):
    summary = ReportService.generate_summary_report(_rows())
    assert summary["total_rows"] == 2
    assert summary["failed_rows"] == 1
    assert summary["methods_used"] == {"constructive": 1}
    assert summary["max_le_minus_lower"] == pytest.approx(0.5 - 1 / 3)
    ReportService.print_summary(summary)
    assert "RESUMO" in capsys.readouterr().out
