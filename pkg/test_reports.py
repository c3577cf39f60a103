"""Tests for deterministic report output."""

import json

import numpy as np
import pytest

from gpt_spectra.errors import ConfigError, DimensionMismatch
from gpt_spectra.models import make_ball, make_quantum
from gpt_spectra.reports import (
    CheckReport,
    csv_report,
    dumps_report,
    load_vector,
    to_list,
    vector_record,
    write_report,
)


def _report() -> CheckReport:
    return CheckReport(
        check="stp",
        holds=False,
        samples=3,
        worst_margin=0.1,
        witness={"b": [1 / 3, np.float64(2.0)], "a": None},
        notes=["z"],
    )


def test_json_uses_sorted_keys_and_17_digits():
    text = dumps_report(_report())
    assert text.endswith("\n")
    assert "0.10000000000000001" in text
    assert "0.33333333333333331" in text
    data = json.loads(text)
    assert list(data) == sorted(data)
    assert list(data["witness"]) == ["a", "b"]


def test_json_is_byte_identical_across_calls():
    assert dumps_report(_report()) == dumps_report(_report())


def test_non_finite_floats_become_null():
    report = CheckReport(check="x", holds=True, worst_margin=float("inf"))
    assert json.loads(dumps_report(report))["worst_margin"] is None


def test_csv_holds_top_level_scalars():
    header, row = csv_report(_report()).strip().split("\n")
    assert header.split(",") == ["check", "holds", "method", "samples", "schema_version", "worst_margin"]
    assert row.startswith("stp,False,sampled,3,")


def test_write_report(tmp_path):
    path = tmp_path / "out.json"
    text = write_report(_report(), str(path))
    assert path.read_text(encoding="utf-8") == text


def test_to_list_converts_nested_numpy():
    assert to_list({"x": (np.arange(2), np.int64(3))}) == {"x": [[0, 1], 3]}


def test_vector_records_load_back(tmp_path):
    sys = make_quantum(2)
    path = tmp_path / "state.json"
    path.write_text(vector_record(np.array([0.5, 0.5, 0.0, 0.0]), sys).model_dump_json(), encoding="utf-8")
    assert load_vector(str(path), sys).tolist() == [0.5, 0.5, 0.0, 0.0]
    with pytest.raises(DimensionMismatch):
        load_vector(str(path), make_ball(2))


def test_vector_saved_for_another_model_is_rejected(tmp_path):
    path = tmp_path / "state.json"
    path.write_text(vector_record(np.array([1.0, 0.0, 0.0, 0.0]), make_quantum(2)).model_dump_json(), encoding="utf-8")
    ball = make_ball(3)
    assert ball.dim == 4
    with pytest.raises(ConfigError):
        load_vector(str(path), ball)
