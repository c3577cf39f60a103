"""System abstraction: cones, states, effects, measurements and positive maps.

A system is a finite-dimensional ordered vector space A with a regular cone
A+, an order unit u in the interior of the dual cone, and the standard
coordinate pairing <e, x> = e . x between A* and A. Every catalog model picks
coordinates in which this dot product is the physical pairing (trace pairing
for quantum, affine evaluation for the planar and polyhedral models).
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional, Sequence, Union

import numpy as np
from scipy.optimize import linprog

from .configuration import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    DimensionMismatch,
    LPNumericalFailure,
    ModelUnsupported,
    NotAState,
    OutOfRange,
)

logger = logging.getLogger(__name__)

NET_SEED = 0x5EED
Vector = Union[np.ndarray, Sequence[float]]


class ModelKind(str, Enum):
    """Catalog model tags."""

    CLASSICAL = "classical"
    QUANTUM = "quantum"
    BALL = "ball"
    SQUARE_BIT = "square_bit"
    BIPYRAMID = "bipyramid"
    ELLIPSE = "ellipse"
    PUFFED_TRIANGLE = "puffed_triangle"
    POLYHEDRAL = "polyhedral"


@dataclass(frozen=True, eq=False)
class StateVec:
    """Element of A+; normalized when u(coords) = 1."""

    coords: np.ndarray
    normalized: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float).copy())


@dataclass(frozen=True, eq=False)
class EffectVec:
    """Linear functional on A, given in dual coordinates."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float).copy())


@dataclass(frozen=True, eq=False)
class Measurement:
    """Finite list of effects adding up to the order unit."""

    effects: tuple[EffectVec, ...]

    def __post_init__(self) -> None:
        effects = tuple(e if isinstance(e, EffectVec) else EffectVec(e) for e in self.effects)
        if not effects:
            raise ValueError("a measurement needs at least one effect")
        object.__setattr__(self, "effects", effects)

    @classmethod
    def from_matrix(cls, rows: np.ndarray) -> "Measurement":
        return cls(tuple(EffectVec(r) for r in np.atleast_2d(rows)))

    @property
    def matrix(self) -> np.ndarray:
        """Effects stacked as rows."""
        return np.vstack([e.coords for e in self.effects])

    def __len__(self) -> int:
        return len(self.effects)

    def probabilities(self, state: "StateVec") -> np.ndarray:
        """Outcome distribution on ``state``."""
        return self.matrix @ state.coords


@dataclass(frozen=True, eq=False)
class LinearMapA:
    """Linear map on A; its adjoint (transpose) acts on A*."""

    matrix: np.ndarray
    positive: bool = False
    reversible: bool = False

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"map must be square, got shape {m.shape}")
        object.__setattr__(self, "matrix", m.copy())

    @classmethod
    def identity(cls, dim: int) -> "LinearMapA":
        return cls(np.eye(dim), positive=True, reversible=True)

    def adjoint(self) -> np.ndarray:
        """Matrix of the dual action on effects."""
        return self.matrix.T

    def __matmul__(self, other: "LinearMapA") -> "LinearMapA":
        return LinearMapA(
            self.matrix @ other.matrix,
            positive=self.positive and other.positive,
            reversible=self.reversible and other.reversible,
        )


@dataclass(frozen=True)
class Face:
    """Face of the state cone, identified by a model-specific hashable key."""

    key: tuple
    rank: int
    label: str = ""
    data: Any = field(default=None, compare=False, hash=False)


@dataclass
class ValidityReport:
    """Result of a measurement validity check."""

    valid: bool
    diagnostic: str
    sum_error: float
    worst_margin: float


class SystemModel(ABC):
    """Abstract base class for all systems.

    Subclasses supply the cone oracle, pure-state structure, decomposer,
    hat/tilde maps, reversible group and face lattice of one model family.
    """

    kind: ModelKind
    n_max: int

    def __init__(self, dim: int, unit: Vector, params: Optional[dict[str, Any]] = None):
        """Initialize the system.

        Args:
            dim: Dimension of the ambient space A
            unit: Order unit u, in dual coordinates
            params: Model-specific parameters (for serialization)
        """
        self.dim = int(dim)
        self.unit = np.asarray(unit, dtype=float)
        if self.unit.shape != (self.dim,):
            raise DimensionMismatch(f"unit has shape {self.unit.shape}, expected ({self.dim},)")
        self.params: dict[str, Any] = dict(params or {})
        self._net_cache: dict[int, np.ndarray] = {}

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items() if k != "vertices")
        return f"{type(self).__name__}({args})"

    def spec(self) -> dict[str, Any]:
        """Config block that rebuilds this model."""
        return {"model": self.kind.value, **self.params}

    def check_dim(self, x: Vector) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        if arr.shape != (self.dim,):
            raise DimensionMismatch(f"expected a vector of length {self.dim}, got shape {arr.shape}")
        return arr

    # --- cone and effects -------------------------------------------------

    @abstractmethod
    def cone_margin(self, x: np.ndarray) -> float:
        """Signed distance-like margin of ``x`` to the cone boundary (>= 0 inside)."""

    def in_cone(self, x: np.ndarray, tol: float = 1e-10) -> bool:
        return self.cone_margin(self.check_dim(x)) >= -tol

    @abstractmethod
    def effect_range(self, e: np.ndarray) -> tuple[float, float]:
        """Minimum and maximum of the functional ``e`` over normalized states."""

    @abstractmethod
    def minimizing_pure_state(self, e: np.ndarray) -> np.ndarray:
        """A pure state on which ``e`` attains its minimum."""

    @property
    def exact_validity(self) -> bool:
        """Whether effect_range is exact rather than sampled."""
        return True

    @property
    def finite_extreme_rays(self) -> bool:
        """Whether pure_net lists every extreme ray of the cone."""
        return False

    # --- states -----------------------------------------------------------

    @abstractmethod
    def sample_pure(self, rng: np.random.Generator) -> np.ndarray:
        """Random pure state."""

    def sample_state(self, rng: np.random.Generator) -> np.ndarray:
        """Random normalized state (Dirichlet mixture of random pure states)."""
        count = self.n_max + 1
        weights = rng.dirichlet(np.ones(count))
        return sum(w * self.sample_pure(rng) for w in weights)

    def pure_net(self, size: int = 256) -> np.ndarray:
        """Deterministic pure-state net, one state per row."""
        if size not in self._net_cache:
            rng = np.random.default_rng(NET_SEED)
            self._net_cache[size] = np.vstack([self.sample_pure(rng) for _ in range(size)])
        return self._net_cache[size]

    @abstractmethod
    def is_pure(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        """Purity certificate for a normalized state."""

    def reference_pure_state(self) -> np.ndarray:
        """Canonical pure state (target of adiabatic alignment)."""
        return self.pure_net(1)[0]

    def special_states(self) -> list[np.ndarray]:
        """States of special interest to the axiom checkers."""
        return []

    # --- decompositions -----------------------------------------------------

    @abstractmethod
    def decompose(self, x: np.ndarray) -> list[tuple[float, np.ndarray]]:
        """Canonical decomposition into perfectly distinguishable pure states."""

    def decompositions(self, x: np.ndarray) -> list[list[tuple[float, np.ndarray]]]:
        """All decompositions the model can enumerate (at least the canonical one)."""
        return [self.decompose(x)]

    def distinguishing_candidate(self, states: np.ndarray) -> Optional[np.ndarray]:
        """Closed-form distinguishing measurement, verified by the caller."""
        return None

    # --- atoms ------------------------------------------------------------

    @abstractmethod
    def tilde(self, omega: np.ndarray) -> np.ndarray:
        """Atomic effect equal to 1 on the pure state ``omega``."""

    @abstractmethod
    def hat(self, e: np.ndarray) -> np.ndarray:
        """Unique normalized state on which the atomic effect ``e`` is 1."""

    @abstractmethod
    def is_atomic(self, e: np.ndarray, tol: float = 1e-9) -> bool:
        """Whether ``e`` is a maximal effect on an extreme ray of A*+."""

    def sample_atom(self, rng: np.random.Generator) -> np.ndarray:
        return self.tilde(self.sample_pure(rng))

    # --- reversible maps ----------------------------------------------------

    @abstractmethod
    def sample_reversible(self, rng: np.random.Generator) -> np.ndarray:
        """Random order automorphism preserving u."""

    @abstractmethod
    def reversible_between(self, source: np.ndarray, target: np.ndarray) -> Optional[np.ndarray]:
        """A reversible map taking pure ``source`` to pure ``target``, if one exists."""

    def symmetry_group(self) -> Optional[list[np.ndarray]]:
        """All reversible maps, for models with a finite group."""
        return None

    def map_positivity_margin(self, matrix: np.ndarray, net_size: int = 256) -> float:
        """Worst cone margin of the images of the pure-state net."""
        images = self.pure_net(net_size) @ matrix.T
        return min(self.cone_margin(y) for y in images)

    # --- faces --------------------------------------------------------------

    def face_of(self, x: np.ndarray) -> Face:
        raise ModelUnsupported(f"{self.kind.value} has no face lattice")

    def top_face(self) -> Face:
        raise ModelUnsupported(f"{self.kind.value} has no face lattice")

    def bottom_face(self) -> Face:
        raise ModelUnsupported(f"{self.kind.value} has no face lattice")

    def face_complement(self, face: Face) -> Face:
        raise ModelUnsupported(f"{self.kind.value} has no face complement")

    def face_join(self, f: Face, g: Face) -> Face:
        raise ModelUnsupported(f"{self.kind.value} has no face lattice")

    def face_meet(self, f: Face, g: Face) -> Face:
        raise ModelUnsupported(f"{self.kind.value} has no face lattice")

    def face_leq(self, f: Face, g: Face) -> bool:
        raise ModelUnsupported(f"{self.kind.value} has no face lattice")

    def face_equal(self, f: Face, g: Face) -> bool:
        return f.key == g.key

    def face_effect_range(self, face: Face, e: np.ndarray) -> tuple[float, float]:
        """Range of ``e`` over the normalized states of ``face``."""
        raise ModelUnsupported(f"{self.kind.value} has no face lattice")

    def face_pure_states(self, face: Face, count: int, rng: np.random.Generator) -> np.ndarray:
        raise ModelUnsupported(f"{self.kind.value} has no face lattice")

    def lattice_faces(self, cap: int, rng: np.random.Generator) -> list[Face]:
        raise ModelUnsupported(f"{self.kind.value} has no enumerable face lattice")

    def filter_pair(self, face: Face) -> tuple[np.ndarray, np.ndarray]:
        """Filter onto ``face`` and its complement filter, as matrices on A."""
        raise ModelUnsupported(f"{self.kind.value} has no filters")

    def face_unit(self, face: Face) -> np.ndarray:
        """Projective unit u o P_F."""
        projection, _ = self.filter_pair(face)
        return projection.T @ self.unit

    def face_span(self, face: Face) -> np.ndarray:
        """Orthonormal basis (columns) of lin F."""
        raise ModelUnsupported(f"{self.kind.value} has no face spans")

    # --- dual-space spectral structure ----------------------------------------

    def spectral_terms(self, a: np.ndarray, rel_tol: float = 1e-9) -> list[tuple[float, np.ndarray]]:
        """Expansion of ``a`` in mutually orthogonal projective units (all terms)."""
        raise ModelUnsupported(f"{self.kind.value} is not projective")

    def atomic_refinement(self, p: np.ndarray) -> list[np.ndarray]:
        """Mutually orthogonal atoms adding up to the projective unit ``p``."""
        raise ModelUnsupported(f"{self.kind.value} is not projective")


def as_state(x: Union[StateVec, Vector], sys: Optional[SystemModel] = None) -> StateVec:
    if isinstance(x, StateVec):
        return x
    arr = np.asarray(x, dtype=float)
    normalized = sys is None or abs(float(sys.unit @ arr) - 1.0) <= 1e-9
    return StateVec(arr, normalized=normalized)


def as_effect(e: Union[EffectVec, Vector]) -> EffectVec:
    return e if isinstance(e, EffectVec) else EffectVec(e)


def make_state(sys: SystemModel, coords: Vector, tol: Tolerances = DEFAULT_TOLERANCES) -> StateVec:
    """Validate ``coords`` against the cone oracle and wrap them."""
    x = sys.check_dim(coords)
    if not sys.in_cone(x, tol=tol.map):
        raise NotAState(f"vector is outside the {sys.kind.value} cone (margin {sys.cone_margin(x):.3g})")
    return StateVec(x, normalized=abs(float(sys.unit @ x) - 1.0) <= tol.linear * max(1, sys.dim))


def evaluate(
    e: Union[EffectVec, Vector],
    omega: Union[StateVec, Vector],
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Dual pairing <e, omega>, clamped into [0, 1] within the clamp tolerance."""
    ev, sv = as_effect(e).coords, as_state(omega).coords
    if ev.shape != sv.shape:
        raise DimensionMismatch(f"effect has shape {ev.shape}, state has shape {sv.shape}")
    value = float(ev @ sv)
    if value < -tol.clamp or value > 1.0 + tol.clamp:
        raise OutOfRange(f"pairing {value!r} is outside [0, 1]")
    return min(max(value, 0.0), 1.0)


def is_valid_measurement(
    m: Measurement, sys: SystemModel, tol: Tolerances = DEFAULT_TOLERANCES
) -> ValidityReport:
    """Check that the effects add up to u and are valid on every normalized state."""
    rows = m.matrix
    if rows.shape[1] != sys.dim:
        return ValidityReport(False, f"effects have dimension {rows.shape[1]}, system {sys.dim}", np.inf, -np.inf)
    sum_error = float(np.max(np.abs(rows.sum(axis=0) - sys.unit)))
    worst = np.inf
    failing = []
    for i, row in enumerate(rows):
        lo, hi = sys.effect_range(row)
        margin = min(lo, 1.0 - hi)
        worst = min(worst, margin)
        if margin < -tol.lp:
            failing.append(f"effect {i} ranges over [{lo:.3g}, {hi:.3g}]")
    if sum_error > tol.linear * max(1.0, float(np.abs(sys.unit).max())) * 10:
        return ValidityReport(False, f"effects sum to u only within {sum_error:.3g}", sum_error, worst)
    if failing:
        return ValidityReport(False, "; ".join(failing), sum_error, worst)
    return ValidityReport(True, "ok", sum_error, worst)


def _delta_error(rows: np.ndarray, states: np.ndarray) -> float:
    return float(np.max(np.abs(rows @ states.T - np.eye(len(states)))))


def _certify_distinguishing(
    rows: np.ndarray, states: np.ndarray, sys: SystemModel, tol: Tolerances
) -> bool:
    if _delta_error(rows, states) > tol.lp:
        return False
    if np.max(np.abs(rows.sum(axis=0) - sys.unit)) > tol.lp:
        return False
    return all(sys.effect_range(r)[0] >= -tol.lp for r in rows)


def _distinguishing_lp(states: np.ndarray, unit: np.ndarray, constraints: np.ndarray):
    k, dim = states.shape
    n_var = k * dim
    a_eq, b_eq = [], []
    for i in range(k):
        for j in range(k):
            row = np.zeros(n_var)
            row[i * dim:(i + 1) * dim] = states[j]
            a_eq.append(row)
            b_eq.append(1.0 if i == j else 0.0)
    for c in range(dim):
        row = np.zeros(n_var)
        row[c::dim] = 1.0
        a_eq.append(row)
        b_eq.append(unit[c])
    a_ub = np.zeros((k * len(constraints), n_var))
    for i in range(k):
        a_ub[i * len(constraints):(i + 1) * len(constraints), i * dim:(i + 1) * dim] = -constraints
    return linprog(
        np.zeros(n_var),
        A_ub=a_ub,
        b_ub=np.zeros(len(a_ub)),
        A_eq=np.array(a_eq),
        b_eq=np.array(b_eq),
        bounds=(None, None),
        method="highs",
    )


def perfectly_distinguishable(
    states: Sequence[Union[StateVec, Vector]],
    sys: SystemModel,
    tol: Tolerances = DEFAULT_TOLERANCES,
    net_size: int = 256,
    max_rounds: int = 60,
) -> Optional[Measurement]:
    """Find a measurement {e_i} with e_i(omega_j) = delta_ij, or None.

    Validity constraints are the vertex constraints for polyhedral models and a
    pure-state net refined by cutting planes (the minimizing pure state of each
    violating effect) for smooth models.

    Raises:
        LPNumericalFailure: if the solver fails or the cutting planes stall
    """
    rows = np.vstack([sys.check_dim(as_state(s).coords) for s in states])
    if np.max(np.abs(rows @ sys.unit - 1.0)) > 1e-9:
        raise NotAState("perfect distinguishability is defined for normalized states")
    if len(rows) == 1:
        return Measurement((EffectVec(sys.unit),))

    candidate = sys.distinguishing_candidate(rows)
    if candidate is not None and _certify_distinguishing(candidate, rows, sys, tol):
        return Measurement.from_matrix(candidate)

    constraints = sys.pure_net(net_size)
    for round_index in range(max_rounds):
        result = _distinguishing_lp(rows, sys.unit, constraints)
        if result.status == 2:
            logger.debug("[core] distinguishability LP infeasible after %d rounds", round_index + 1)
            return None
        if result.status != 0:
            raise LPNumericalFailure(f"linprog status {result.status}: {result.message}")
        effects = result.x.reshape(len(rows), sys.dim)
        cuts = [
            sys.minimizing_pure_state(e)
            for e in effects
            if sys.effect_range(e)[0] < -tol.lp
        ]
        if not cuts:
            if _delta_error(effects, rows) > tol.lp:
                raise LPNumericalFailure("LP solution violates the delta conditions")
            return Measurement.from_matrix(effects)
        if sys.finite_extreme_rays:
            raise LPNumericalFailure("exact LP returned an invalid effect")
        constraints = np.vstack([constraints, *cuts])
    raise LPNumericalFailure(f"cutting planes did not converge in {max_rounds} rounds")


def apply_map(
    t: LinearMapA, omega: Union[StateVec, Vector], sys: SystemModel, tol: Tolerances = DEFAULT_TOLERANCES
) -> StateVec:
    """Image of a state under a positive map."""
    x = sys.check_dim(as_state(omega, sys).coords)
    if t.matrix.shape != (sys.dim, sys.dim):
        raise DimensionMismatch(f"map has shape {t.matrix.shape}, system dimension is {sys.dim}")
    y = t.matrix @ x
    if not sys.in_cone(y, tol=tol.map):
        raise NotAState(f"image is outside the cone (margin {sys.cone_margin(y):.3g})")
    normalized = abs(float(sys.unit @ y) - 1.0) <= 1e-9
    if t.reversible and not normalized:
        raise NotAState("reversible map did not preserve normalization")
    return StateVec(y, normalized=normalized)
