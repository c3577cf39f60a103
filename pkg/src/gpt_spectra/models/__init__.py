"""Model catalog: constructors for every system family and a config-driven factory."""

from typing import Any, Mapping, Sequence

from ..core import ModelKind, SystemModel
from ..errors import ConfigError
from .ball import BallModel
from .classical import ClassicalModel
from .planar import EllipseModel, PuffedTriangleModel, SupportFunctionModel
from .polytope import SQUARE_VERTICES, PolytopeModel, bipyramid_vertices
from .quantum import QuantumModel
from .strictly_convex import StrictlyConvexModel


def make_classical(n: int) -> ClassicalModel:
    return ClassicalModel(n)


def make_quantum(d: int) -> QuantumModel:
    return QuantumModel(d)


def make_ball(k: int) -> BallModel:
    return BallModel(k)


def make_square_bit() -> PolytopeModel:
    """Square [-1, 1]^2 as a state space."""
    return PolytopeModel(SQUARE_VERTICES, kind=ModelKind.SQUARE_BIT)


def make_bipyramid() -> PolytopeModel:
    """Polyhedral triangular pillow: triangle in the equator plus two poles."""
    return PolytopeModel(bipyramid_vertices(), kind=ModelKind.BIPYRAMID)


def make_ellipse(a: float, b: float, chord_resolution: int = 10_000) -> EllipseModel:
    return EllipseModel(a, b, chord_resolution=chord_resolution)


def make_puffed_triangle(e3: float = 0.1, e2: float = 0.05, chord_resolution: int = 10_000) -> PuffedTriangleModel:
    return PuffedTriangleModel(e3, e2, chord_resolution=chord_resolution)


def make_polytope(vertices: Sequence[Sequence[float]], enumeration_budget: int = 2_000_000) -> PolytopeModel:
    return PolytopeModel(vertices, enumeration_budget=enumeration_budget)


_BUILDERS = {
    ModelKind.CLASSICAL: (make_classical, {"n": 3}),
    ModelKind.QUANTUM: (make_quantum, {"d": 2}),
    ModelKind.BALL: (make_ball, {"k": 3}),
    ModelKind.SQUARE_BIT: (make_square_bit, {}),
    ModelKind.BIPYRAMID: (make_bipyramid, {}),
    ModelKind.ELLIPSE: (make_ellipse, {"a": 2.0, "b": 1.0}),
    ModelKind.PUFFED_TRIANGLE: (make_puffed_triangle, {"e3": 0.1, "e2": 0.05}),
    ModelKind.POLYHEDRAL: (make_polytope, {}),
}


def model_from_spec(spec: Mapping[str, Any], **options: Any) -> SystemModel:
    """Build a model from a config block such as {"model": "quantum", "d": 3}.

    ``options`` passes budget knobs (chord_resolution, enumeration_budget) to
    the constructors that take them.
    """
    values = dict(spec)
    try:
        kind = ModelKind(values.pop("model"))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"unknown or missing model in {dict(spec)!r}") from exc
    builder, defaults = _BUILDERS[kind]
    params = {**defaults, **values}
    if kind in (ModelKind.ELLIPSE, ModelKind.PUFFED_TRIANGLE) and "chord_resolution" in options:
        params["chord_resolution"] = options["chord_resolution"]
    if kind is ModelKind.POLYHEDRAL and "enumeration_budget" in options:
        params["enumeration_budget"] = options["enumeration_budget"]
    try:
        return builder(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {kind.value}: {exc}") from exc


__all__ = [
    "BallModel",
    "ClassicalModel",
    "EllipseModel",
    "PolytopeModel",
    "PuffedTriangleModel",
    "QuantumModel",
    "StrictlyConvexModel",
    "SupportFunctionModel",
    "make_ball",
    "make_bipyramid",
    "make_classical",
    "make_ellipse",
    "make_polytope",
    "make_puffed_triangle",
    "make_quantum",
    "make_square_bit",
    "model_from_spec",
]
