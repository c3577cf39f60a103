"""Work accounting for the membrane protocol on a labelled composite.

A particle carries a classical label and an internal state. Filters sort the
internal state into containers, reversible maps align every container on one
pure state, and isothermal compression of container i to q_i V costs
-kT ln q_i. The expected work of taking omega to sigma is kT(S(omega) - S(sigma)).
"""

import logging
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, computed_field
from scipy import constants

from .configuration import DEFAULT_TOLERANCES, Tolerances
from .core import SystemModel, as_state
from .errors import FiltersIncomplete, NoReversibleMap, NotAState
from .projective import Filter, build_filter
from .reports import Report, to_list
from .seeding import rng_for
from .spectral import decompose, spectral_entropy

logger = logging.getLogger(__name__)

BOLTZMANN = constants.k
Assumption = Literal["costless-separation", "adiabatic", "computed", "reversal"]


@dataclass
class Branch:
    label: int
    weight: float
    state: Optional[np.ndarray]  # None for zero-weight branches


@dataclass
class CompositeState:
    """Mixture over classical labels of conditional internal states."""

    branches: list[Branch]
    volumes: list[float] = field(default_factory=list)

    @property
    def weights(self) -> np.ndarray:
        return np.array([b.weight for b in self.branches])

    def vector(self, dim: int, n_labels: int) -> np.ndarray:
        """Direct-sum coordinates, one block of length ``dim`` per label."""
        z = np.zeros(n_labels * dim)
        for b in self.branches:
            if b.state is not None:
                z[b.label * dim:(b.label + 1) * dim] += b.weight * b.state
        return z


class LedgerStep(BaseModel):
    name: str = Field(description="Protocol step")
    works: list[float] = Field(description="Work per branch in joules")
    probabilities: list[float] = Field(description="Branch probabilities")
    heat: bool = Field(False, description="Whether heat is exchanged with the bath")
    assumption: Assumption = Field(description="Whether the cost is assumed or computed")

    @computed_field  # type: ignore[prop-decorator]
    @property
    def expected_work(self) -> float:
        return float(np.dot(self.works, self.probabilities)) if self.works else 0.0


class WorkLedger(Report):
    """Ordered steps of a protocol run with their work."""

    model: dict = Field(default_factory=dict)
    k: float = Field(BOLTZMANN, description="Boltzmann constant, J/K")
    temperature: float = Field(description="Bath temperature, K")
    volume: float = Field(description="Initial container volume")
    initial_entropy: float = Field(0.0, description="Spectral entropy of the initial state, nats")
    target_entropy: float = Field(0.0, description="Spectral entropy of the target state, nats")
    steps: list[LedgerStep] = Field(default_factory=list)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def total_expected_work(self) -> float:
        return float(sum(step.expected_work for step in self.steps))

    @computed_field  # type: ignore[prop-decorator]
    @property
    def expected_work_over_kT(self) -> float:
        return self.total_expected_work / (self.k * self.temperature)


# --- separation ---------------------------------------------------------------


def _separation_matrix(
    maps: Sequence[np.ndarray],
    sys: SystemModel,
    samples: int = 20,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    n, dim = len(maps), sys.dim
    total = sum(p.T @ sys.unit for p in maps)
    if np.max(np.abs(total - sys.unit)) > tol.sampled:
        raise FiltersIncomplete("filter units do not add up to the unit effect")
    t = np.zeros((n * dim, n * dim))
    for x in range(n):
        for i, p in enumerate(maps):
            y = (x + i) % n
            t[y * dim:(y + 1) * dim, x * dim:(x + 1) * dim] += p
    rng = rng_for(seed)
    for _ in range(samples):
        weights = rng.dirichlet(np.ones(n))
        z = np.concatenate([w * sys.sample_state(rng) for w in weights])
        image = t @ z
        blocks = image.reshape(n, dim)
        if min(sys.cone_margin(b) for b in blocks) < -tol.sampled:
            raise NotAState("separation map sends a composite state outside the cone")
        if abs(float(blocks.sum(axis=0) @ sys.unit) - 1.0) > tol.linear * n * dim * 100:
            raise NotAState("separation map does not preserve normalization")
    return t


def separation_map(
    filters: Sequence[Filter],
    sys: SystemModel,
    samples: int = 20,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """x (x) omega -> sum_i (x + i mod N) (x) P_i omega as a matrix on N copies of A.

    Raises:
        FiltersIncomplete: the filters' units do not add up to u
    """
    return _separation_matrix([f.map.matrix for f in filters], sys, samples, seed, tol)


def membrane_map(
    f: Filter, sys: SystemModel, samples: int = 20, seed: int = 0, tol: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """Two-container membrane built from a filter and its complement."""
    return _separation_matrix([f.map.matrix, f.complement.matrix], sys, samples, seed, tol)


def spectral_filters(omega, sys: SystemModel, tol: Tolerances = DEFAULT_TOLERANCES) -> list[Filter]:
    """Filters onto the faces of the decomposition parts, completed to the unit when needed."""
    x = sys.check_dim(as_state(omega, sys).coords)
    parts = decompose(x, sys, tol=tol).parts
    filters = [build_filter(sys.face_of(s), sys, seed=i, tol=tol) for i, (_, s) in enumerate(parts)]
    covered = sum(f.unit_effect.coords for f in filters)
    if np.max(np.abs(covered - sys.unit)) > tol.sampled:
        joined = sys.bottom_face()
        for f in filters:
            joined = sys.face_join(joined, f.face)
        filters.append(build_filter(sys.face_complement(joined), sys, seed=len(filters), tol=tol))
    return filters


def separate(
    omega,
    filters: Sequence[Filter],
    sys: SystemModel,
    volume: float = 1.0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CompositeState:
    """Apply the separation map to label 0 (x) omega and read off the branches."""
    x = sys.check_dim(as_state(omega, sys).coords)
    n, dim = len(filters), sys.dim
    t = separation_map(filters, sys, tol=tol)
    start = np.zeros(n * dim)
    start[:dim] = x
    blocks = (t @ start).reshape(n, dim)
    branches = []
    for label, block in enumerate(blocks):
        weight = float(sys.unit @ block)
        if weight <= tol.clamp:
            branches.append(Branch(label, 0.0, None))
        else:
            branches.append(Branch(label, weight, block / weight))
    return CompositeState(branches, [volume] * n)


# --- protocol steps -----------------------------------------------------------


def adiabatic_align(
    composite: CompositeState, target, sys: SystemModel, tol: Tolerances = DEFAULT_TOLERANCES
) -> tuple[CompositeState, list[dict]]:
    """Reversibly rotate every branch onto the pure state ``target``.

    Raises:
        NoReversibleMap: the model has no reversible map for some branch
    """
    goal = sys.check_dim(as_state(target, sys).coords)
    branches = []
    certificate = []
    for b in composite.branches:
        if b.state is None:
            branches.append(b)
            continue
        t = sys.reversible_between(b.state, goal)
        if t is None:
            raise NoReversibleMap(f"no reversible map takes branch {b.label} to the target state")
        image = t @ b.state
        if np.max(np.abs(image - goal)) > tol.map * 100:
            raise NoReversibleMap(f"reversible map misses the target by {float(np.max(np.abs(image - goal))):.3g}")
        branches.append(Branch(b.label, b.weight, goal.copy()))
        certificate.append({"label": b.label, "map": to_list(t)})
    return CompositeState(branches, list(composite.volumes)), certificate


def isothermal_compress(
    composite: CompositeState, temperature: float, k: float = BOLTZMANN, volume: float = 1.0
) -> tuple[CompositeState, LedgerStep]:
    """Compress container i from V to q_i V at temperature T: W_i = -kT ln q_i."""
    kept = [b for b in composite.branches if b.weight > 0]
    if len(kept) < len(composite.branches):
        logger.warning("[thermo] %d zero-weight branches dropped", len(composite.branches) - len(kept))
    q = np.array([b.weight for b in kept])
    works = -k * temperature * np.log(q)
    step = LedgerStep(
        name="isothermal-compression",
        works=to_list(works),
        probabilities=to_list(q),
        heat=True,
        assumption="computed",
    )
    return CompositeState(kept, to_list(q * volume)), step


def _forward(
    omega, sys: SystemModel, temperature: float, k: float, volume: float, tol: Tolerances
) -> list[LedgerStep]:
    filters = spectral_filters(omega, sys, tol)
    composite = separate(omega, filters, sys, volume, tol)
    q = to_list(composite.weights)
    steps = [
        LedgerStep(name="separation", works=[0.0] * len(q), probabilities=q, assumption="costless-separation")
    ]
    aligned, certificate = adiabatic_align(composite, sys.reference_pure_state(), sys, tol)
    logger.debug("[thermo] aligned %d branches", len(certificate))
    steps.append(LedgerStep(name="adiabatic-alignment", works=[0.0] * len(q), probabilities=q, assumption="adiabatic"))
    compressed, step = isothermal_compress(aligned, temperature, k, volume)
    steps.append(step)
    if abs(sum(compressed.volumes) - volume) > tol.sampled * volume:
        raise NotAState("compressed volumes do not add up to the initial volume")
    steps.append(LedgerStep(name="merge", works=[0.0], probabilities=[1.0], assumption="computed"))
    return steps


def run_von_neumann(
    omega,
    sigma,
    sys: SystemModel,
    temperature: float = 300.0,
    k: float = BOLTZMANN,
    volume: float = 1.0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> WorkLedger:
    """Forward protocol on omega followed by the reversed protocol of sigma."""
    forward = _forward(omega, sys, temperature, k, volume, tol)
    backward = [
        LedgerStep(
            name=f"reverse-{step.name}",
            works=[-w for w in step.works],
            probabilities=step.probabilities,
            heat=step.heat,
            assumption="reversal",
        )
        for step in reversed(_forward(sigma, sys, temperature, k, volume, tol))
    ]
    ledger = WorkLedger(
        model=sys.spec(),
        k=k,
        temperature=temperature,
        volume=volume,
        initial_entropy=spectral_entropy(omega, sys),
        target_entropy=spectral_entropy(sigma, sys),
        steps=forward + backward,
    )
    logger.info(
        "[thermo] expected work %.6g J (%.6g kT)", ledger.total_expected_work, ledger.expected_work_over_kT
    )
    return ledger
