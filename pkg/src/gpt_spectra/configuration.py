"""Run configuration: tolerances, sample budgets, model spec and output options."""

import json
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - Python 3.10 fallback
    import tomli as tomllib

from dotenv import load_dotenv

from .errors import ConfigError

ENV_PREFIX = "GPT_SPECTRA_"
REPORT_FORMATS = ("json", "csv")
LOG_BASES = ("e", "2")


@dataclass(frozen=True, kw_only=True)
class Tolerances:
    """Numeric tolerances used across the package."""

    linear: float = 1e-12  # linear identities (normalization, sums)
    lp: float = 1e-9  # LP-derived objects
    majorization: float = 1e-10  # partial-sum comparisons
    map: float = 1e-10  # idempotence, complement relations
    sampled: float = 1e-9  # sampled certificates
    degeneracy: float = 1e-9  # relative merge threshold for eigenvalues
    clamp: float = 1e-12  # pairing clamp into [0, 1]

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise ConfigError(f"tolerance {f.name} must be positive, got {value}")


DEFAULT_TOLERANCES = Tolerances()


@dataclass(kw_only=True)
class Budgets:
    """Sample and enumeration budgets."""

    samples: int = 50  # states per axiom check
    trials: int = 200  # measurements per majorization run
    bases: int = 5  # atomic bases for basis independence
    net_size: int = 256  # pure-state net used for sampled certificates
    face_cap: int = 200
    lattice_cap: int = 1024
    chord_resolution: int = 10_000
    enumeration_budget: int = 2_000_000
    group_samples: int = 20


@dataclass(kw_only=True)
class RunConfig:
    """The configurable fields for a gpt-spectra run."""

    model: dict[str, Any] = field(default_factory=lambda: {"model": "quantum", "d": 2})
    seed: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)
    budgets: Budgets = field(default_factory=Budgets)
    output: Optional[str] = None  # report path; stdout when unset
    report_format: str = "json"
    log_base: str = "e"
    threads: int = 1
    temperature: float = 300.0  # kelvin, for the von Neumann ledger
    volume: float = 1.0

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        self.seed = int(self.seed)
        if self.report_format not in REPORT_FORMATS:
            raise ConfigError(f"unknown report format {self.report_format!r}")
        if str(self.log_base) not in LOG_BASES:
            raise ConfigError(f"log base must be one of {LOG_BASES}, got {self.log_base!r}")
        self.log_base = str(self.log_base)
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if not self.temperature > 0 or not self.volume > 0:
            raise ConfigError("temperature and volume must be positive")

    @classmethod
    def from_mapping(cls, values: dict[str, Any]) -> "RunConfig":
        """Create a RunConfig from a plain dict (config file contents)."""
        values = dict(values)
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        try:
            if isinstance(values.get("tolerances"), dict):
                values["tolerances"] = Tolerances(**values["tolerances"])
            if isinstance(values.get("budgets"), dict):
                values["budgets"] = Budgets(**values["budgets"])
            return cls(**values)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_sources(
        cls,
        config_file: Optional[str] = None,
        overrides: Optional[dict[str, Any]] = None,
    ) -> "RunConfig":
        """Create a RunConfig from defaults, a config file, env vars and overrides.

        Later sources win: file < GPT_SPECTRA_* environment < explicit overrides.
        """
        load_dotenv()
        values: dict[str, Any] = load_config_file(config_file) if config_file else {}
        for f in fields(cls):
            env_value = os.environ.get(ENV_PREFIX + f.name.upper())
            if env_value is not None and f.name not in ("model", "tolerances", "budgets"):
                values[f.name] = _coerce(env_value, f.type)
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_mapping(values)

    def with_overrides(self, **changes: Any) -> "RunConfig":
        """Return a copy with the given fields replaced."""
        return replace(self, **changes)


def load_config_file(path: str) -> dict[str, Any]:
    """Read a TOML or JSON configuration file."""
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        if file_path.suffix == ".toml":
            with file_path.open("rb") as f:
                return tomllib.load(f)
        return json.loads(file_path.read_text(encoding="utf-8"))
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc


def _coerce(raw: str, annotation: Any) -> Any:
    if annotation in (int, "int"):
        return int(raw)
    if annotation in (float, "float"):
        return float(raw)
    return raw
