"""Tests for run configuration and seed derivation."""

import json

import pytest

from gpt_spectra.configuration import Budgets, RunConfig, Tolerances, load_config_file
from gpt_spectra.errors import ConfigError
from gpt_spectra.seeding import derive_seed, parallel_map, rng_for, thread_cap


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("SEED", "THREADS", "LOG_BASE", "TEMPERATURE", "REPORT_FORMAT", "OUTPUT"):
        monkeypatch.delenv(f"GPT_SPECTRA_{name}", raising=False)


def test_defaults():
    config = RunConfig()
    assert config.model == {"model": "quantum", "d": 2}
    assert config.budgets.samples == 50
    assert config.budgets.trials == 200
    assert config.tolerances.majorization == 1e-10
    assert config.report_format == "json"


def test_toml_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        'seed = 7\nlog_base = "2"\n[model]\nmodel = "ball"\nk = 3\n[budgets]\nsamples = 5\n',
        encoding="utf-8",
    )
    config = RunConfig.from_sources(str(path))
    assert config.seed == 7
    assert config.log_base == "2"
    assert config.model == {"model": "ball", "k": 3}
    assert config.budgets.samples == 5
    assert config.budgets.trials == 200


def test_json_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"threads": 3, "tolerances": {"lp": 1e-8}}), encoding="utf-8")
    config = RunConfig.from_sources(str(path))
    assert config.threads == 3
    assert config.tolerances.lp == 1e-8


def test_env_overrides_file_and_overrides_win(tmp_path, monkeypatch):
    path = tmp_path / "run.toml"
    path.write_text("seed = 1\ntemperature = 10.0\n", encoding="utf-8")
    monkeypatch.setenv("GPT_SPECTRA_SEED", "2")
    monkeypatch.setenv("GPT_SPECTRA_TEMPERATURE", "20.5")
    config = RunConfig.from_sources(str(path), overrides={"seed": 3, "threads": None})
    assert config.seed == 3
    assert config.temperature == 20.5
    assert config.threads == 1


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config_file("/nonexistent/run.toml")


def test_unparseable_file(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("seed = = 1", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config_file(str(path))


@pytest.mark.parametrize(
    "values",
    [
        {"colour": "red"},
        {"seed": -1},
        {"report_format": "xml"},
        {"log_base": "10"},
        {"threads": 0},
        {"temperature": 0.0},
        {"budgets": {"samples": 5, "sample": 3}},
    ],
)
def test_invalid_values(values):
    with pytest.raises(ConfigError):
        RunConfig.from_mapping(values)


def test_tolerances_must_be_positive():
    with pytest.raises(ConfigError):
        Tolerances(lp=0.0)


def test_with_overrides_copies():
    config = RunConfig(budgets=Budgets(samples=3))
    changed = config.with_overrides(seed=5)
    assert changed.seed == 5
    assert config.seed == 0
    assert changed.budgets.samples == 3


def test_derived_seeds_are_stable_and_distinct():
    assert derive_seed(0, 1) == derive_seed(0, 1)
    assert len({derive_seed(0, i) for i in range(100)}) == 100
    assert derive_seed(0, 1, 2) != derive_seed(0, 2, 1)
    assert derive_seed(5) == 5


def test_rng_for_reproduces_draws():
    assert rng_for(3, 4).random() == rng_for(3, 4).random()


def test_parallel_map_keeps_order():
    assert parallel_map(lambda i: i * i, range(20), threads=4) == [i * i for i in range(20)]


def test_thread_cap_respects_environment(monkeypatch):
    monkeypatch.setenv("GPT_SPECTRA_THREADS", "2")
    assert thread_cap(8) == 2
    assert thread_cap(None) == 1
