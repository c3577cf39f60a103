"""Filters, complements, atomic effects and the face-lattice checks.

A filter onto a face F is a positive idempotent map P with u(Px) <= u(x)
whose positive image is F and whose positive kernel is the positive image
of the complementary filter P'.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .configuration import DEFAULT_TOLERANCES, Tolerances
from .core import (
    EffectVec,
    Face,
    LinearMapA,
    StateVec,
    SystemModel,
    as_state,
    evaluate,
    perfectly_distinguishable,
)
from .errors import (
    LPNumericalFailure,
    ModelUnsupported,
    NotAtomic,
    NotProjective,
    NotPure,
)
from .reports import CheckReport, to_list
from .seeding import rng_for

logger = logging.getLogger(__name__)

MAX_PAIRS = 2000


@dataclass
class Filter:
    """Filter onto ``face`` and its complementary filter."""

    map: LinearMapA
    complement: LinearMapA
    face: Face
    complement_face: Face
    unit_effect: EffectVec

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.map.matrix @ x


@dataclass
class AtomicEffect:
    """Atomic effect paired with the unique state on which it is 1."""

    effect: EffectVec
    hat_state: StateVec


def _idempotence_error(p: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(p))))
    return float(np.max(np.abs(p @ p - p))) / scale


def build_filter(
    face: Face,
    sys: SystemModel,
    net_size: int = 256,
    samples: int = 8,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Filter:
    """Filter onto ``face`` with idempotence, positivity, normalization and complement relations certified.

    Raises:
        NotProjective: no certified filter exists for ``face``
    """
    try:
        p, p_c = sys.filter_pair(face)
        complement_face = sys.face_complement(face)
    except ModelUnsupported as exc:
        raise NotProjective(str(exc)) from exc

    for name, m in (("filter", p), ("complement filter", p_c)):
        err = _idempotence_error(m)
        if err > tol.map * 100:
            raise NotProjective(f"{name} of {face.label} is not idempotent (error {err:.3g})")
        margin = sys.map_positivity_margin(m, net_size)
        if margin < -tol.sampled:
            raise NotProjective(f"{name} of {face.label} is not positive (margin {margin:.3g})")
        lo, _ = sys.effect_range(sys.unit - m.T @ sys.unit)
        if lo < -tol.sampled:
            raise NotProjective(f"{name} of {face.label} increases the unit (by {-lo:.3g})")

    cross = max(float(np.max(np.abs(p_c @ p))), float(np.max(np.abs(p @ p_c))))
    if cross > tol.map * 100:
        raise NotProjective(f"filters of {face.label} and its complement do not annihilate each other")

    rng = rng_for(seed)
    for inside, m_in, m_out in ((face, p, p_c), (complement_face, p_c, p)):
        for x in sys.face_pure_states(inside, samples, rng):
            if np.max(np.abs(m_in @ x - x)) > tol.map * 100 or np.max(np.abs(m_out @ x)) > tol.map * 100:
                raise NotProjective(f"positive image of the filter of {inside.label} is not its kernel's complement")

    # positive kernel of P lies inside the positive image of P'
    for x in sys.pure_net(net_size):
        if abs(float(sys.unit @ (p @ x))) <= tol.sampled and np.max(np.abs(p_c @ x - x)) > tol.map * 100:
            raise NotProjective(f"state killed by the filter of {face.label} is not fixed by its complement")

    logger.debug("[projective] certified filter for %s", face.label)
    return Filter(
        map=LinearMapA(p, positive=True),
        complement=LinearMapA(p_c, positive=True),
        face=face,
        complement_face=complement_face,
        unit_effect=EffectVec(p.T @ sys.unit),
    )


def neutrality_check(
    f: Filter, sys: SystemModel, samples: int = 50, seed: int = 0, tol: Tolerances = DEFAULT_TOLERANCES
) -> CheckReport:
    """States the filter passes without loss are left undisturbed."""
    rng = rng_for(seed)
    p = f.map.matrix
    worst = 0.0
    vacuous = 0
    witness = None
    for i in range(samples):
        x = sys.sample_state(rng)
        if i % 2 == 0:
            x = p @ x
            if float(sys.unit @ x) <= tol.sampled:
                vacuous += 1
                continue
        if float(sys.unit @ x) - float(sys.unit @ (p @ x)) > tol.sampled:
            vacuous += 1
            continue
        err = float(np.max(np.abs(p @ x - x)))
        if err > worst:
            worst = err
            witness = {"state": to_list(x), "image": to_list(p @ x)}
    logger.debug("[projective] neutrality: %d vacuous samples of %d", vacuous, samples)
    holds = worst <= tol.map * 100
    return CheckReport(
        check="neutrality",
        holds=holds,
        samples=samples,
        worst_margin=worst,
        witness=None if holds else witness,
        notes=[f"{vacuous} samples lose weight in the filter"] if vacuous else [],
    )


def tilde(omega, sys: SystemModel) -> AtomicEffect:
    """Atomic effect taking the value 1 on the pure state ``omega``.

    Raises:
        NotPure: ``omega`` is not a pure state
    """
    x = sys.check_dim(as_state(omega, sys).coords)
    if not sys.is_pure(x):
        raise NotPure("tilde is defined on pure states")
    return AtomicEffect(EffectVec(sys.tilde(x)), StateVec(x))


def hat(pi, sys: SystemModel) -> StateVec:
    """The unique normalized state on which the atomic effect ``pi`` is 1.

    Raises:
        NotAtomic: ``pi`` is not atomic
    """
    e = pi.effect.coords if isinstance(pi, AtomicEffect) else sys.check_dim(pi)
    if not sys.is_atomic(e):
        raise NotAtomic("hat is defined on atomic effects")
    return StateVec(sys.hat(e))


def transition_probability(sigma, omega, sys: SystemModel) -> float:
    """tilde(omega) evaluated on sigma."""
    s = sys.check_dim(as_state(sigma, sys).coords)
    if not sys.is_pure(s):
        raise NotPure("transition probabilities are defined between pure states")
    return evaluate(tilde(omega, sys).effect, s)


def check_hat_tilde(
    sys: SystemModel, n_samples: int = 50, seed: int = 0, tol: Tolerances = DEFAULT_TOLERANCES
) -> CheckReport:
    """hat and tilde invert each other on sampled pure states."""
    rng = rng_for(seed)
    worst = 0.0
    witness = None
    try:
        for _ in range(n_samples):
            omega = sys.sample_pure(rng)
            e = sys.tilde(omega)
            err = float(max(np.max(np.abs(sys.hat(e) - omega)), np.max(np.abs(sys.tilde(sys.hat(e)) - e))))
            if err > worst:
                worst, witness = err, {"state": to_list(omega), "effect": to_list(e)}
    except ModelUnsupported as exc:
        return CheckReport(check="hat_tilde", holds=False, samples=0, notes=[str(exc)])
    holds = worst <= tol.map * 100
    return CheckReport(
        check="hat_tilde", holds=holds, samples=n_samples, worst_margin=worst, witness=None if holds else witness
    )


def check_STP(
    sys: SystemModel, n_pairs: int = 50, seed: int = 0, tol: Tolerances = DEFAULT_TOLERANCES
) -> CheckReport:
    """Symmetry of transition probabilities on sampled pure pairs."""
    rng = rng_for(seed)
    worst = 0.0
    witness = None
    try:
        for _ in range(n_pairs):
            omega, sigma = sys.sample_pure(rng), sys.sample_pure(rng)
            forward = float(sys.tilde(omega) @ sigma)
            backward = float(sys.tilde(sigma) @ omega)
            gap = abs(forward - backward)
            if gap > worst:
                worst = gap
                witness = {
                    "states": [to_list(omega), to_list(sigma)],
                    "transition_probabilities": [forward, backward],
                }
    except ModelUnsupported as exc:
        logger.info("[projective] STP undefined on %s: %s", sys.kind.value, exc)
        return CheckReport(
            check="stp",
            holds=False,
            samples=0,
            method="exact" if sys.finite_extreme_rays else "sampled",
            notes=[f"tilde is not defined on every pure state: {exc}"],
        )
    holds = worst < tol.sampled
    logger.info("[projective] STP on %s: max asymmetry %.3g", sys.kind.value, worst)
    return CheckReport(
        check="stp",
        holds=holds,
        samples=n_pairs,
        worst_margin=worst,
        method="exact" if sys.finite_extreme_rays else "sampled",
        witness=None if holds else witness,
    )


def _state_pairs(sys: SystemModel, n_pairs: int, rng: np.random.Generator) -> list[tuple[np.ndarray, np.ndarray]]:
    """Alternating orthogonal pure pairs, random pure pairs and random mixed pairs."""
    pairs = []
    for i in range(n_pairs):
        sigma = sys.sample_pure(rng)
        if i % 3 == 0:
            others = sys.face_pure_states(sys.face_complement(sys.face_of(sigma)), 1, rng)
            if len(others):
                pairs.append((others[0], sigma))
                continue
        if i % 3 == 1:
            pairs.append((sys.sample_pure(rng), sigma))
        else:
            pairs.append((sys.sample_state(rng), sys.sample_state(rng)))
    return pairs


def check_lemma_distinguishability(
    sys: SystemModel, n_pairs: int = 30, seed: int = 0, tol: Tolerances = DEFAULT_TOLERANCES
) -> CheckReport:
    """LP distinguishability of state pairs agrees with face(omega) <= face(sigma)'."""
    rng = rng_for(seed)
    disagreements = 0
    skipped = 0
    tested = 0
    witness = None
    try:
        pairs = _state_pairs(sys, n_pairs, rng)
        for omega, sigma in pairs:
            try:
                by_lp = perfectly_distinguishable([omega, sigma], sys, tol) is not None
            except LPNumericalFailure as exc:
                logger.debug("[projective] skipped pair: %s", exc)
                skipped += 1
                continue
            by_faces = sys.face_leq(sys.face_of(omega), sys.face_complement(sys.face_of(sigma)))
            tested += 1
            if by_lp != by_faces:
                disagreements += 1
                if witness is None:
                    witness = {"states": [to_list(omega), to_list(sigma)], "lp": by_lp, "faces": by_faces}
    except (ModelUnsupported, NotProjective) as exc:
        return CheckReport(check="lemma1", holds=False, samples=tested, notes=[f"face complement unavailable: {exc}"])
    notes = [f"{skipped} pairs skipped after LP failures"] if skipped else []
    return CheckReport(
        check="lemma1",
        holds=disagreements == 0,
        samples=tested,
        worst_margin=float(disagreements),
        method="exact" if sys.finite_extreme_rays else "sampled",
        witness=witness,
        notes=notes,
    )


def _face_pairs(faces: list[Face], rng: np.random.Generator) -> list[tuple[Face, Face]]:
    pairs = list(itertools.product(faces, repeat=2))
    if len(pairs) <= MAX_PAIRS:
        return pairs
    chosen = rng.choice(len(pairs), size=MAX_PAIRS, replace=False)
    return [pairs[i] for i in sorted(chosen)]


def check_orthomodular_identities(
    sys: SystemModel, cap: int = 1024, seed: int = 0, tol: Tolerances = DEFAULT_TOLERANCES
) -> CheckReport:
    """Involution, De Morgan duality, the orthomodular law and additivity of units.

    Raises:
        LatticeTooLarge: the face lattice exceeds ``cap``
    """
    rng = rng_for(seed)
    faces = sys.lattice_faces(cap, rng)
    failures: list[str] = []
    worst_unit = 0.0
    try:
        comp = {id(f): sys.face_complement(f) for f in faces}
        for f in faces:
            if not sys.face_equal(sys.face_complement(comp[id(f)]), f):
                failures.append(f"complement of the complement of {f.label} differs")
        pairs = _face_pairs(faces, rng)
        for f, g in pairs:
            if not sys.face_equal(
                sys.face_complement(sys.face_join(f, g)), sys.face_meet(comp[id(f)], comp[id(g)])
            ):
                failures.append(f"De Morgan fails for {f.label}, {g.label}")
            if sys.face_leq(f, g) and not sys.face_equal(g, sys.face_join(f, sys.face_meet(g, comp[id(f)]))):
                failures.append(f"orthomodular law fails for {f.label} <= {g.label}")
            if sys.face_leq(f, comp[id(g)]):
                gap = float(
                    np.max(np.abs(sys.face_unit(sys.face_join(f, g)) - sys.face_unit(f) - sys.face_unit(g)))
                )
                worst_unit = max(worst_unit, gap)
                if gap > tol.map * 100:
                    failures.append(f"units of orthogonal {f.label}, {g.label} do not add up")
    except (ModelUnsupported, NotProjective) as exc:
        return CheckReport(check="orthomodular", holds=False, samples=len(faces), notes=[str(exc)])
    logger.info("[projective] lattice of %d faces, %d identity failures", len(faces), len(failures))
    return CheckReport(
        check="orthomodular",
        holds=not failures,
        samples=len(faces),
        worst_margin=worst_unit,
        method="exact" if sys.finite_extreme_rays else "sampled",
        witness={"failure": failures[0]} if failures else None,
        notes=failures[1:6],
    )


def check_projectivity(
    sys: SystemModel,
    cap: int = 200,
    seed: int = 0,
    net_size: int = 256,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CheckReport:
    """Every enumerated face has a certified filter."""
    rng = rng_for(seed)
    try:
        faces = sys.lattice_faces(cap, rng)
    except ModelUnsupported as exc:
        return CheckReport(check="projectivity", holds=False, notes=[str(exc)])
    failed: Optional[tuple[Face, str]] = None
    failures = 0
    for i, face in enumerate(faces):
        try:
            build_filter(face, sys, net_size=net_size, seed=i, tol=tol)
        except NotProjective as exc:
            failures += 1
            failed = failed or (face, str(exc))
    logger.info("[projective] %d of %d faces without a filter", failures, len(faces))
    return CheckReport(
        check="projectivity",
        holds=failures == 0,
        samples=len(faces),
        worst_margin=float(failures),
        method="exact" if sys.finite_extreme_rays else "sampled",
        witness={"face": failed[0].label, "reason": failed[1]} if failed else None,
    )
