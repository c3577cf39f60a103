"""Majorization, doubly substochastic matrices and fine-grained measurements.

Outcome distributions of fine-grained measurements are compared against the
spectrum of a state: on systems with unique spectra, projective filters and
symmetric transition probabilities the spectrum majorizes every such
distribution.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import nnls

from .configuration import DEFAULT_TOLERANCES, Tolerances
from .core import Measurement, SystemModel, as_state, is_valid_measurement
from .errors import (
    DecompositionUnavailable,
    ModelUnsupported,
    NegativeEntry,
    NotAtomic,
    NotFineGrained,
    NotPure,
)
from .reports import CheckReport, to_list
from .seeding import derive_seed, parallel_map, rng_for
from .spectral import Decomposition, SymmetricFunction, decompose, shannon, spectrum

logger = logging.getLogger(__name__)

MAX_REJECTIONS = 20
FALLBACK_FRAMES = 3


def prob_vector(entries: Sequence[float], clamp: float = DEFAULT_TOLERANCES.clamp) -> np.ndarray:
    """Entries as floats, with small negatives clamped to zero."""
    p = np.asarray(entries, dtype=float).ravel()
    if np.any(p < -clamp):
        raise NegativeEntry(f"probability vector has entry {float(p.min())!r}")
    return np.clip(p, 0.0, None)


def _padded_pair(y: Sequence[float], x: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    y = np.sort(np.asarray(y, dtype=float).ravel())[::-1]
    x = np.sort(np.asarray(x, dtype=float).ravel())[::-1]
    n = max(len(y), len(x))
    return np.pad(y, (0, n - len(y))), np.pad(x, (0, n - len(x)))


def partial_sum_slack(y: Sequence[float], x: Sequence[float]) -> np.ndarray:
    """Partial sums of sorted y minus those of sorted x (all >= 0 when x <_w y)."""
    ys, xs = _padded_pair(y, x)
    return np.cumsum(ys) - np.cumsum(xs)


def weak_majorizes(
    y: Sequence[float], x: Sequence[float], tol: float = DEFAULT_TOLERANCES.majorization
) -> bool:
    """Lower weak majorization x <_w y."""
    return bool(np.all(partial_sum_slack(y, x) >= -tol))


def majorizes(y: Sequence[float], x: Sequence[float], tol: float = DEFAULT_TOLERANCES.majorization) -> bool:
    """x is majorized by y: weak majorization plus equal totals."""
    slack = partial_sum_slack(y, x)
    return bool(np.all(slack >= -tol) and abs(slack[-1]) <= tol)


def is_doubly_substochastic(m: np.ndarray, tol: float = DEFAULT_TOLERANCES.linear) -> bool:
    """Nonnegative with every row and column sum at most 1.

    Raises:
        NegativeEntry: an entry is below -tol
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if np.any(m < -tol):
        raise NegativeEntry(f"matrix has entry {float(m.min())!r}")
    return bool(np.all(m.sum(axis=1) <= 1 + tol) and np.all(m.sum(axis=0) <= 1 + tol))


def substochastic_witness(
    m: np.ndarray, tol: float = DEFAULT_TOLERANCES.majorization
) -> Optional[np.ndarray]:
    """A nonnegative y among the basis vectors and the all-ones vector with My not <_w y."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    candidates = list(np.eye(m.shape[1])) + [np.ones(m.shape[1])]
    for y in candidates:
        my = m @ y
        if np.any(my < -tol) or not weak_majorizes(y, my, tol):
            return y
    return None


# --- fine-grained measurements ------------------------------------------------


def fine_grained_split(
    m: Measurement, sys: SystemModel, tol: Tolerances = DEFAULT_TOLERANCES
) -> list[tuple[float, np.ndarray]]:
    """Write every nonzero effect as c * atom with 0 < c <= 1.

    Raises:
        NotFineGrained: some effect is not proportional to an atomic effect,
            or the effects do not add up to the unit
    """
    split = []
    for i, e in enumerate(m.matrix):
        _, c = sys.effect_range(e)
        if c <= tol.sampled:
            continue
        atom = e / c
        if not sys.is_atomic(atom, tol=tol.sampled * 100):
            raise NotFineGrained(f"effect {i} is not proportional to an atomic effect")
        split.append((float(min(c, 1.0)), atom))
    total = sum((c * atom for c, atom in split), np.zeros(sys.dim))
    if np.max(np.abs(total - sys.unit)) > tol.sampled * 10:
        raise NotFineGrained("effects do not add up to the unit")
    return split


@dataclass
class TransitionMatrix:
    """M_ij = c_i * atom_i(omega_j) between a fine-grained measurement and a decomposition."""

    m: np.ndarray
    row_scalars: np.ndarray
    atoms: np.ndarray
    spectral_states: np.ndarray
    stochastic_error: float
    row_excess: float
    tol: Tolerances = DEFAULT_TOLERANCES

    @property
    def row_stochastic(self) -> bool:
        """Outcome probabilities of each spectral state add up to one."""
        return self.stochastic_error <= self.tol.majorization

    @property
    def column_substochastic(self) -> bool:
        """Sum over spectral states of M_ij stays below c_i."""
        return self.row_excess <= self.tol.lp


def transition_matrix(
    m: Measurement, dec: Decomposition, sys: SystemModel, tol: Tolerances = DEFAULT_TOLERANCES
) -> TransitionMatrix:
    """Matrix taking the spectrum to the outcome distribution of ``m``."""
    split = fine_grained_split(m, sys, tol)
    c = np.array([s for s, _ in split])
    atoms = np.vstack([a for _, a in split])
    states = dec.states
    matrix = c[:, None] * (atoms @ states.T)
    stochastic_error = float(np.max(np.abs(matrix.sum(axis=0) - 1.0)))
    row_excess = float(np.max(matrix.sum(axis=1) - c))
    if not dec.certified_distinguishable:
        logger.warning("[majorization] decomposition is not certified distinguishable")
    return TransitionMatrix(matrix, c, atoms, states, stochastic_error, row_excess, tol)


def _accepted(rows: np.ndarray, sys: SystemModel, tol: Tolerances) -> Optional[Measurement]:
    """The measurement with effects ``rows`` if it is valid and fine-grained."""
    m = Measurement.from_matrix(rows)
    validity = is_valid_measurement(m, sys, tol)
    if not validity.valid:
        logger.debug("[majorization] rejected sampled measurement: %s", validity.diagnostic)
        return None
    try:
        fine_grained_split(m, sys, tol)
    except NotFineGrained as exc:
        logger.debug("[majorization] rejected sampled measurement: %s", exc)
        return None
    return m


def _nnls_measurement(sys: SystemModel, atoms: np.ndarray, tol: Tolerances) -> Optional[np.ndarray]:
    # nnls can misreport its residual, so the completion is checked against u here
    weights, _ = nnls(atoms.T, sys.unit)
    keep = weights > tol.clamp
    if not np.any(keep):
        return None
    rows = weights[keep, None] * atoms[keep]
    residual = float(np.linalg.norm(rows.sum(axis=0) - sys.unit))
    if residual > tol.lp:
        return None
    return rows


def _frame(sys: SystemModel, rng: np.random.Generator, tol: Tolerances) -> np.ndarray:
    """Atoms of one spectral decomposition, completed to the unit."""
    x = sys.sample_state(rng)
    atoms = [sys.tilde(s) for _, s in decompose(x, sys, certify=False).parts]
    remainder = sys.unit - sum(atoms)
    if np.max(np.abs(remainder)) > tol.sampled:
        atoms.extend(sys.atomic_refinement(remainder))
    return np.vstack(atoms)


def sample_finegrained_measurement(
    sys: SystemModel,
    n_atoms: Optional[int] = None,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Measurement:
    """Random fine-grained measurement whose effects add up to the unit.

    Random atoms are completed to a measurement by nonnegative least squares
    against the unit; after repeated rejection a Dirichlet mixture of spectral
    frames is returned instead. Every candidate is checked for validity and
    fine-grainedness before it is returned.

    Raises:
        NotFineGrained: neither the completion nor the fallback produced a valid measurement
    """
    rng = rng_for(seed)
    count = n_atoms or 2 * sys.dim
    for _ in range(MAX_REJECTIONS):
        atoms = np.vstack([sys.sample_atom(rng) for _ in range(count)])
        rows = _nnls_measurement(sys, atoms, tol)
        if rows is None:
            continue
        m = _accepted(rows, sys, tol)
        if m is not None:
            return m
    logger.debug("[majorization] NNLS rejected %d times, mixing spectral frames", MAX_REJECTIONS)
    frames = [_frame(sys, rng, tol) for _ in range(FALLBACK_FRAMES)]
    weights = rng.dirichlet(np.ones(len(frames)))
    m = _accepted(np.vstack([w * f for w, f in zip(weights, frames)]), sys, tol)
    if m is None:
        raise NotFineGrained(f"no valid fine-grained measurement sampled for seed {seed}")
    return m


def spectral_measurement(omega, sys: SystemModel, tol: Tolerances = DEFAULT_TOLERANCES) -> Measurement:
    """Tildes of the decomposition's pure states, completed by atoms of the remainder.

    Raises:
        ModelUnsupported: the model lacks tilde or atomic refinement
    """
    dec = decompose(omega, sys, certify=False, tol=tol)
    atoms = [sys.tilde(s) for _, s in dec.parts]
    remainder = sys.unit - sum(atoms)
    if np.max(np.abs(remainder)) > tol.sampled:
        atoms.extend(sys.atomic_refinement(remainder))
    return Measurement.from_matrix(np.vstack(atoms))


def _outcomes(m: Measurement, x: np.ndarray) -> np.ndarray:
    return np.clip(m.matrix @ x, 0.0, None)


def verify_theorem_majorization(
    sys: SystemModel,
    omega,
    n_measurements: int = 200,
    seed: int = 0,
    threads: int = 1,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CheckReport:
    """Spectrum majorizes the outcome distribution of sampled fine-grained measurements."""
    x = sys.check_dim(as_state(omega, sys).coords)
    p = spectrum(x, sys).probs
    notes: list[str] = []
    measurements: list[Measurement] = []
    try:
        measurements.append(spectral_measurement(x, sys, tol))
    except (ModelUnsupported, NotPure, NotAtomic) as exc:
        notes.append(f"spectral measurement unavailable: {exc}")
    measurements.extend(
        parallel_map(
            lambda i: sample_finegrained_measurement(sys, seed=derive_seed(seed, i), tol=tol),
            range(n_measurements),
            threads,
        )
    )
    worst = np.inf
    witness = None
    violations = 0
    for m in measurements:
        q = _outcomes(m, x)
        slack = float(np.min(partial_sum_slack(p, q)[:-1])) if len(q) > 1 or len(p) > 1 else 0.0
        total_gap = abs(float(q.sum() - p.sum()))
        if not majorizes(p, q, tol.majorization):
            violations += 1
            if witness is None:
                witness = {"spectrum": to_list(p), "outcomes": to_list(q), "effects": to_list(m.matrix)}
        worst = min(worst, slack, -total_gap)
    if witness is not None:
        witness["violations"] = violations
    logger.info("[majorization] %d measurements, %d violations, worst slack %.3g", len(measurements), violations, worst)
    return CheckReport(
        check="majorization",
        holds=violations == 0,
        samples=len(measurements),
        worst_margin=float(worst),
        witness=witness,
        notes=notes + ([f"{violations} outcome distributions not majorized"] if violations else []),
    )


def measurement_entropy(
    omega,
    sys: SystemModel,
    budget: int = 200,
    seed: int = 0,
    functional: Optional[SymmetricFunction] = None,
    log_base: str = "e",
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Smallest outcome entropy over the spectral and ``budget`` sampled fine-grained measurements."""
    x = sys.check_dim(as_state(omega, sys).coords)
    fn = functional or (lambda q: shannon(q, log_base))
    values = []
    try:
        values.append(fn(_outcomes(spectral_measurement(x, sys, tol), x)))
    except (ModelUnsupported, NotPure, NotAtomic, DecompositionUnavailable) as exc:
        logger.warning("[majorization] spectral measurement unavailable: %s", exc)
    for i in range(budget):
        m = sample_finegrained_measurement(sys, seed=derive_seed(seed, i), tol=tol)
        values.append(fn(_outcomes(m, x)))
    return float(min(values))


def group_average_majorization(
    sys: SystemModel,
    omega,
    n_group_samples: int = 20,
    weights: Optional[Sequence[float]] = None,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CheckReport:
    """Spectrum of a mixture of reversible images is majorized by the original spectrum.

    Uses the full group for models with a finite symmetry group, otherwise the
    identity plus ``n_group_samples`` sampled reversible maps.
    """
    x = sys.check_dim(as_state(omega, sys).coords)
    group = sys.symmetry_group()
    if group is None:
        rng = rng_for(seed)
        group = [np.eye(sys.dim)] + [sys.sample_reversible(rng) for _ in range(n_group_samples)]
    if weights is None:
        w = np.full(len(group), 1.0 / len(group))
    else:
        w = prob_vector(weights, tol.clamp)
        if len(w) != len(group) or abs(w.sum() - 1.0) > tol.majorization:
            raise ValueError("mixing weights must match the group samples and add up to one")
    averaged = sum(wk * (t @ x) for wk, t in zip(w, group))
    p, q = spectrum(x, sys).probs, spectrum(averaged, sys).probs
    slack = partial_sum_slack(p, q)
    holds = majorizes(p, q, tol.majorization)
    return CheckReport(
        check="group_average",
        holds=holds,
        samples=len(group),
        worst_margin=float(np.min(slack)),
        method="exact" if sys.symmetry_group() is not None else "sampled",
        witness=None if holds else {"spectrum": to_list(p), "averaged_spectrum": to_list(q)},
    )
