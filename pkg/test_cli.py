"""Tests for the gpt-spectra command line."""

import json

import numpy as np
import pytest

from gpt_spectra.cli import EXPECTATIONS, main
from gpt_spectra.models import make_quantum
from gpt_spectra.reports import vector_record


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.toml"
    path.write_text(
        "[budgets]\nsamples = 8\ntrials = 10\nbases = 2\nnet_size = 64\nface_cap = 20\nlattice_cap = 64\n",
        encoding="utf-8",
    )
    return str(path)


@pytest.fixture
def qubit_state(tmp_path):
    sys = make_quantum(2)
    path = tmp_path / "state.json"
    path.write_text(vector_record(sys.unit / 2, sys).model_dump_json(), encoding="utf-8")
    return str(path)


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_schema(capsys):
    assert main(["schema", "entropy"]) == 0
    schema = _stdout_json(capsys)
    assert "spectrum" in schema["properties"]


def test_model_summary(capsys):
    assert main(["model", "--model", "quantum", "--d", "3", "--samples", "2"]) == 0
    summary = _stdout_json(capsys)
    assert summary["dim"] == 9
    assert summary["n_max"] == 3
    assert len(summary["sample_pure_states"]) == 2


def test_unknown_model_is_a_configuration_error():
    assert main(["model", "--model", "torus"]) == 2


def test_unknown_check_is_a_configuration_error(small_config):
    assert main(["axioms", "--config", small_config, "--model", "classical", "--check", "telepathy"]) == 2


def test_missing_state_file_is_a_configuration_error():
    assert main(["entropy", "--model", "quantum", "--state", "/nonexistent/state.json"]) == 2


def test_entropy_in_bits(capsys, qubit_state):
    assert main(["entropy", "--model", "quantum", "--d", "2", "--state", qubit_state, "--base", "2"]) == 0
    report = _stdout_json(capsys)
    assert report["entropy"] == pytest.approx(1.0)
    assert report["entropy_nats"] == pytest.approx(np.log(2))
    assert report["spectrum"] == pytest.approx([0.5, 0.5])
    assert report["certified_distinguishable"]


def test_entropy_with_measurement_search(capsys, qubit_state):
    assert main(["entropy", "--model", "quantum", "--d", "2", "--state", qubit_state, "--trials", "5"]) == 0
    report = _stdout_json(capsys)
    assert report["measurement_entropy"] == pytest.approx(np.log(2))


@pytest.mark.parametrize(
    "model_args",
    [["--model", "classical", "--n", "3"], ["--model", "quantum", "--d", "2"], ["--model", "ball", "--k", "3"]],
)
def test_axioms_match_the_expectation_table(capsys, small_config, model_args):
    args = ["axioms", "--config", small_config, "--check", "ws,spectrality,projectivity,stp", *model_args]
    assert main(args) == 0
    report = _stdout_json(capsys)
    assert report["passed"]
    assert [c["holds"] for c in report["checks"]] == [True] * 4


def test_square_bit_failures_are_expected(capsys, small_config):
    assert main(["axioms", "--config", small_config, "--model", "square_bit", "--check", "ws,stp"]) == 0
    report = _stdout_json(capsys)
    assert report["expected"] == {"ws": False, "stp": False}
    assert not any(c["holds"] for c in report["checks"])


def test_expectation_table_covers_every_check():
    for table in EXPECTATIONS.values():
        assert set(table) == set(EXPECTATIONS["quantum"])


def test_majorize_report_is_reproducible(tmp_path, small_config):
    outputs = [tmp_path / "first.json", tmp_path / "second.json"]
    for out in outputs:
        args = ["majorize", "--config", small_config, "--model", "ball", "--k", "3", "--seed", "7", "-o", str(out)]
        assert main(args) == 0
    assert outputs[0].read_bytes() == outputs[1].read_bytes()
    report = json.loads(outputs[0].read_text(encoding="utf-8"))
    assert report["violations"] == 0
    assert report["trials"] == 10


def test_majorize_with_group_average(capsys, small_config):
    assert main(["majorize", "--config", small_config, "--model", "classical", "--n", "3", "--group"]) == 0
    report = _stdout_json(capsys)
    assert report["group_average"]["holds"]


def test_expand_with_riemann_sums(capsys):
    assert main(["expand", "--model", "quantum", "--d", "2", "--riemann", "--seed", "4"]) == 0
    report = _stdout_json(capsys)
    assert report["reconstruction_error"] < 1e-9
    assert report["family_length"] <= 5
    assert len(report["riemann"]["grids"]) == 3


def test_perfection_with_orthotracial(capsys, small_config):
    assert main(["perfection", "--config", small_config, "--model", "classical", "--n", "3", "--orthotracial"]) == 0
    report = _stdout_json(capsys)
    assert report["self_duality"]["perfect"]
    assert report["orthotracial"]["dimension"] == 3


def test_vonneumann_ledger(capsys, qubit_state):
    assert main(["vonneumann", "--model", "quantum", "--d", "2", "--state", qubit_state, "--temp", "1.0"]) == 0
    report = _stdout_json(capsys)
    assert report["expected_work_over_kT"] == pytest.approx(np.log(2))
    assert report["temperature"] == 1.0


def test_polytope_analyze(capsys, tmp_path, small_config):
    path = tmp_path / "square.json"
    path.write_text(json.dumps({"vertices": [[1, 0], [0, 1], [-1, 0], [0, -1]]}), encoding="utf-8")
    assert main(["polytope", "analyze", str(path), "--config", small_config, "--check", "ws"]) == 0
    report = _stdout_json(capsys)
    assert report["n_vertices"] == 4
    assert report["n_facets"] == 4
    assert report["face_counts"] == {"0": 1, "1": 4, "2": 4, "3": 1}
    assert not report["checks"][0]["holds"]


def test_csv_output(capsys):
    assert main(["model", "--model", "classical", "--n", "2", "--format", "csv"]) == 0
    header = capsys.readouterr().out.splitlines()[0]
    assert "dim" in header.split(",")


def test_configured_tolerance_reaches_the_checks(capsys, tmp_path):
    strict = tmp_path / "strict.toml"
    strict.write_text("[budgets]\nsamples = 8\n", encoding="utf-8")
    relaxed = tmp_path / "relaxed.toml"
    relaxed.write_text("[budgets]\nsamples = 8\n\n[tolerances]\nsampled = 1.0\n", encoding="utf-8")
    args = ["axioms", "--model", "puffed_triangle", "--check", "stp"]

    assert main([*args, "--config", str(strict)]) == 0
    assert _stdout_json(capsys)["checks"][0]["holds"] is False

    assert main([*args, "--config", str(relaxed)]) == 1
    report = _stdout_json(capsys)
    assert report["checks"][0]["holds"] is True
    assert report["mismatches"] == ["stp"]


def test_state_file_for_another_model_is_a_configuration_error(qubit_state):
    assert main(["entropy", "--model", "ball", "--k", "3", "--state", qubit_state]) == 2
