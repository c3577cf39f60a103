"""Spectral decompositions of states, spectra, entropies and Schur-concave functionals."""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import entr

from .configuration import DEFAULT_TOLERANCES, Tolerances
from .core import ModelKind, StateVec, SystemModel, as_state, perfectly_distinguishable
from .errors import (
    AsymmetricFunction,
    DecompositionUnavailable,
    LPNumericalFailure,
    ModelUnsupported,
    NotAState,
)
from .reports import CheckReport, to_list
from .seeding import parallel_map, rng_for

logger = logging.getLogger(__name__)

StateLike = Union[StateVec, np.ndarray, Sequence[float]]
SymmetricFunction = Callable[[np.ndarray], float]

# Models whose decomposition probabilities are known to be unique.
UNIQUE_SPECTRUM = {ModelKind.CLASSICAL, ModelKind.QUANTUM, ModelKind.BALL, ModelKind.ELLIPSE}


@dataclass
class Spectrum:
    """Decreasingly ordered decomposition probabilities, padded to n_max."""

    probs: np.ndarray
    n_max: int

    @property
    def descending(self) -> np.ndarray:
        return self.probs

    @property
    def ascending(self) -> np.ndarray:
        return self.probs[::-1]


@dataclass
class Decomposition:
    """Convex decomposition into pure states."""

    parts: list[tuple[float, np.ndarray]]
    certified_distinguishable: bool

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.parts])

    @property
    def states(self) -> np.ndarray:
        return np.vstack([s for _, s in self.parts])


def _normalized(omega: StateLike, sys: SystemModel) -> np.ndarray:
    x = sys.check_dim(as_state(omega, sys).coords)
    if abs(float(sys.unit @ x) - 1.0) > 1e-9:
        raise NotAState("spectral operations need a normalized state")
    return x


def certify_parts(
    parts: list[tuple[float, np.ndarray]], sys: SystemModel, tol: Tolerances = DEFAULT_TOLERANCES
) -> bool:
    if len(parts) < 2:
        return True
    try:
        return perfectly_distinguishable([s for _, s in parts], sys, tol) is not None
    except LPNumericalFailure as exc:
        logger.warning("[spectral] distinguishability LP failed: %s", exc)
        return False


def decompose(
    omega: StateLike, sys: SystemModel, certify: bool = True, tol: Tolerances = DEFAULT_TOLERANCES
) -> Decomposition:
    """Model decomposition into perfectly distinguishable pure states.

    Raises:
        DecompositionUnavailable: the model has no decomposition for this state
    """
    x = _normalized(omega, sys)
    parts = [(p, s) for p, s in sys.decompose(x) if p > 1e-14]
    total = sum(p for p, _ in parts)
    parts = [(p / total, s) for p, s in parts]
    return Decomposition(parts, certify_parts(parts, sys, tol) if certify else False)


def _pad(probs: np.ndarray, n_max: int) -> np.ndarray:
    probs = np.sort(np.clip(probs, 0.0, None))[::-1]
    if len(probs) < n_max:
        probs = np.concatenate([probs, np.zeros(n_max - len(probs))])
    return probs


def spectrum(omega: StateLike, sys: SystemModel) -> Spectrum:
    """Sorted decomposition probabilities padded with zeros to n_max."""
    dec = decompose(omega, sys, certify=False)
    return Spectrum(_pad(dec.probabilities, sys.n_max), sys.n_max)


def shannon(p: np.ndarray, log_base: str = "e") -> float:
    """Shannon entropy with 0 log 0 = 0."""
    value = float(np.sum(entr(np.clip(np.asarray(p, dtype=float), 0.0, None))))
    return value / np.log(2.0) if str(log_base) == "2" else value


def renyi(alpha: float) -> SymmetricFunction:
    """Renyi entropy of order ``alpha`` in nats."""

    def fn(p: np.ndarray) -> float:
        p = np.clip(np.asarray(p, dtype=float), 0.0, None)
        if alpha == 1:
            return shannon(p)
        if np.isinf(alpha):
            return float(-np.log(np.max(p)))
        return float(np.log(np.sum(p[p > 0] ** alpha)) / (1 - alpha))

    return fn


def max_entry(p: np.ndarray) -> float:
    return float(np.max(p))


def total(p: np.ndarray) -> float:
    return float(np.sum(p))


FUNCTIONALS: dict[str, SymmetricFunction] = {
    "shannon": shannon,
    "renyi2": renyi(2.0),
    "max_entry": max_entry,
    "total": total,
}


def spectral_entropy(omega: StateLike, sys: SystemModel, log_base: str = "e") -> float:
    """-sum p log p over the nonzero spectrum."""
    return shannon(spectrum(omega, sys).probs, log_base)


def schur_functional(
    omega: StateLike,
    sys: SystemModel,
    f: SymmetricFunction,
    seed: int = 0,
    checks: int = 5,
    tol: float = 1e-9,
) -> float:
    """Evaluate a symmetric function on the padded spectrum.

    Raises:
        AsymmetricFunction: f changes under a random permutation of its argument
    """
    probs = spectrum(omega, sys).probs
    value = float(f(probs))
    rng = rng_for(seed)
    for _ in range(checks):
        permuted = float(f(rng.permutation(probs)))
        if abs(permuted - value) > tol * max(1.0, abs(value)):
            raise AsymmetricFunction(f"f changed from {value!r} to {permuted!r} under a permutation")
    if sys.kind not in UNIQUE_SPECTRUM:
        logger.warning(
            "[spectral] %s does not satisfy unique spectrality; value depends on the decomposer",
            sys.kind.value,
        )
    return value


def _test_states(sys: SystemModel, n_samples: int, seed: int) -> list[np.ndarray]:
    states = [np.asarray(s, dtype=float) for s in sys.special_states()]
    states.extend(sys.sample_state(rng_for(seed, i)) for i in range(n_samples))
    return states


def check_weak_spectrality(
    sys: SystemModel,
    n_samples: int = 50,
    seed: int = 0,
    threads: int = 1,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CheckReport:
    """Every sampled state has at least one certified decomposition."""

    def attempt(x: np.ndarray) -> Optional[str]:
        try:
            dec = decompose(x, sys, tol=tol)
        except DecompositionUnavailable as exc:
            return str(exc)
        return None if dec.certified_distinguishable else "parts not perfectly distinguishable"

    states = _test_states(sys, n_samples, seed)
    outcomes = parallel_map(attempt, states, threads)
    failures = [(x, why) for x, why in zip(states, outcomes) if why is not None]
    witness = None
    if failures:
        witness = {"state": to_list(failures[0][0]), "reason": failures[0][1]}
    logger.info("[spectral] weak spectrality: %d/%d states decomposed", len(states) - len(failures), len(states))
    return CheckReport(
        check="weak_spectrality",
        holds=not failures,
        samples=len(states),
        worst_margin=float(len(failures)),
        method="exact" if sys.finite_extreme_rays else "sampled",
        witness=witness,
        notes=[f"{len(failures)} states without a decomposition"] if failures else [],
    )


def check_axiom_S(
    sys: SystemModel, n_samples: int = 50, seed: int = 0, tol: float = 1e-9, threads: int = 1
) -> CheckReport:
    """Existence and uniqueness of decomposition probabilities on sampled states."""

    def probability_vectors(x: np.ndarray):
        try:
            found = sys.decompositions(x)
        except DecompositionUnavailable:
            found = []
        return [_pad(np.array([p for p, _ in d]), sys.n_max) for d in found]

    states = _test_states(sys, n_samples, seed)
    vectors = parallel_map(probability_vectors, states, threads)
    missing = [x for x, v in zip(states, vectors) if not v]
    witness = None
    worst = 0.0
    for x, found in zip(states, vectors):
        for other in found[1:]:
            gap = float(np.max(np.abs(found[0] - other)))
            if gap > worst:
                worst = gap
                witness = {
                    "state": to_list(x),
                    "probabilities": [to_list(found[0]), to_list(other)],
                    "sup_distance": gap,
                }
    notes = []
    if missing:
        notes.append(f"{len(missing)} states have no decomposition into distinguishable pure states")
        if witness is None:
            witness = {"state": to_list(missing[0]), "probabilities": []}
    holds = not missing and worst <= tol
    logger.info("[spectral] axiom S on %s: holds=%s, worst spread %.3g", sys.kind.value, holds, worst)
    return CheckReport(
        check="spectrality",
        holds=holds,
        samples=len(states),
        worst_margin=worst,
        method="exact" if sys.finite_extreme_rays else "sampled",
        witness=witness,
        notes=notes,
    )


def check_entropy_concavity(
    sys: SystemModel, n_pairs: int = 50, seed: int = 0, log_base: str = "e", tol: float = 1e-9
) -> CheckReport:
    """S(mixture) >= mixture of S on sampled pairs of states."""
    worst = np.inf
    witness = None
    for i in range(n_pairs):
        rng = rng_for(seed, i)
        omega, sigma = sys.sample_state(rng), sys.sample_state(rng)
        try:
            margin = spectral_entropy(0.5 * (omega + sigma), sys, log_base) - 0.5 * (
                spectral_entropy(omega, sys, log_base) + spectral_entropy(sigma, sys, log_base)
            )
        except (DecompositionUnavailable, ModelUnsupported):
            continue
        if margin < worst:
            worst = margin
            witness = {"states": [to_list(omega), to_list(sigma)], "margin": float(margin)}
    holds = bool(worst >= -tol)
    return CheckReport(
        check="entropy_concavity",
        holds=holds,
        samples=n_pairs,
        worst_margin=None if np.isinf(worst) else float(worst),
        witness=None if holds else witness,
    )


__all__ = [
    "Decomposition",
    "Spectrum",
    "check_axiom_S",
    "check_entropy_concavity",
    "check_weak_spectrality",
    "decompose",
    "schur_functional",
    "spectral_entropy",
    "spectrum",
]
