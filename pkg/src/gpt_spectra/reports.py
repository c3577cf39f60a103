"""Report schemas and deterministic JSON / CSV output."""

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .core import ModelKind, SystemModel
from .errors import ConfigError, DimensionMismatch

SCHEMA_VERSION = "1.0"


class Report(BaseModel):
    """Base class for every machine-readable report."""

    schema_version: str = Field(SCHEMA_VERSION, description="Report schema version")


class CheckReport(Report):
    """Pass/fail outcome of a property checker, backed by numeric margins."""

    check: str = Field(description="Name of the property checked")
    holds: bool = Field(description="Whether the property held on every sample")
    samples: int = Field(0, description="Number of samples or cases examined")
    worst_margin: Optional[float] = Field(None, description="Worst numeric margin observed")
    method: Literal["exact", "sampled"] = Field("sampled", description="Exact or sampled certificate")
    witness: Optional[dict[str, Any]] = Field(None, description="Counterexample data when the property fails")
    notes: list[str] = Field(default_factory=list, description="Caveats and skipped cases")


class ModelSpec(BaseModel):
    """Config block naming a catalog model and its parameters."""

    model_config = ConfigDict(extra="allow")

    model: ModelKind = Field(description="Catalog model tag")


class VectorRecord(BaseModel):
    """Serialized state or effect."""

    system: dict[str, Any] = Field(description="Model spec of the owning system")
    coords: list[float] = Field(description="Coordinates in the model's basis")
    role: Literal["state", "effect"] = Field(description="Whether coords are a state or an effect")


class PolytopeFile(BaseModel):
    """Polytope given by its vertices."""

    vertices: list[list[float]] = Field(description="Affine vertex coordinates")


class ModelSummary(Report):
    """Output of the model subcommand."""

    system: dict[str, Any]
    dim: int
    unit: list[float]
    n_max: int
    sample_pure_states: list[list[float]]


def to_list(x: Any) -> Any:
    """Recursively convert numpy values into plain Python lists and floats."""
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, (list, tuple)):
        return [to_list(v) for v in x]
    if isinstance(x, dict):
        return {k: to_list(v) for k, v in x.items()}
    return x


def vector_record(x: np.ndarray, sys: SystemModel, role: str = "state") -> VectorRecord:
    return VectorRecord(system=sys.spec(), coords=to_list(np.asarray(x, dtype=float)), role=role)


def load_vector(path: str, sys: SystemModel) -> np.ndarray:
    """Read a VectorRecord file and check it against ``sys``.

    Raises:
        DimensionMismatch: the coordinates do not fit the system
        ConfigError: the record names a different model or different parameters
    """
    record = VectorRecord.model_validate_json(Path(path).read_text(encoding="utf-8"))
    coords = np.asarray(record.coords, dtype=float)
    if coords.shape != (sys.dim,):
        raise DimensionMismatch(f"{path} holds {len(coords)} coordinates, system dimension is {sys.dim}")
    expected = sys.spec()
    differing = sorted(k for k, v in record.system.items() if expected.get(k) != v)
    if differing:
        raise ConfigError(f"{path} was saved for {record.system}, not {expected} (differs in {differing})")
    return coords


def _encode(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return "null"
        return format(value, ".17g")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = (f"{json.dumps(str(k))}: {_encode(v)}" for k, v in sorted(value.items()))
        return "{" + ", ".join(items) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in value) + "]"
    raise TypeError(f"cannot encode {type(value).__name__}")


def dumps_report(report: BaseModel) -> str:
    """Sorted-key JSON with 17 significant digits for every float."""
    return _encode(to_list(report.model_dump(mode="json"))) + "\n"


def csv_report(report: BaseModel) -> str:
    """Top-level scalar fields as one header row and one value row."""
    data = report.model_dump(mode="json")
    scalars = {
        k: (format(v, ".17g") if isinstance(v, float) else v)
        for k, v in sorted(data.items())
        if v is None or isinstance(v, (bool, int, float, str))
    }
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(scalars), lineterminator="\n")
    writer.writeheader()
    writer.writerow(scalars)
    return buffer.getvalue()


def render(report: BaseModel, report_format: str = "json") -> str:
    return csv_report(report) if report_format == "csv" else dumps_report(report)


def write_report(report: BaseModel, output: Optional[str], report_format: str = "json") -> str:
    """Render ``report`` and write it to ``output`` when given."""
    text = render(report, report_format)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    return text
