"""The hat map as a linear order isomorphism, its inner product, and self-duality of faces.

phi sends every atomic effect w to the unique state w-hat on which it is 1.
Built from an atomic basis it is the matrix Phi with Phi @ w_i = hat(w_i); the
form (x, y) = <x, Phi y> on effects is symmetric exactly when transition
probabilities are. On states the matching form is K = inv(Phi), and a cone is
self-dual under K when Phi carries the dual cone onto it.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from pydantic import Field
from scipy import linalg

from . import polyhedral
from .configuration import DEFAULT_TOLERANCES, Tolerances
from .core import EffectVec, Face, StateVec, SystemModel
from .errors import (
    DegenerateInput,
    EnumerationBudgetExceeded,
    LatticeTooLarge,
    ModelUnsupported,
    NotABasis,
    NotAtomic,
    NotProjective,
    SingularInnerProduct,
)
from .projective import AtomicEffect, Filter
from .reports import CheckReport, Report, to_list
from .seeding import derive_seed, rng_for

logger = logging.getLogger(__name__)

MAX_DRAWS = 500


@dataclass
class PhiMap:
    """Linear map from effects to states, with its bilinear form on effects.

    ``gram[i, j]`` is <b_i, phi(b_j)> over the rows b_i of ``form_basis``.
    """

    matrix: np.ndarray
    basis_atoms: np.ndarray
    form_basis: np.ndarray
    label: str = "atomic-basis"
    gram: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.gram = self.form_basis @ self.matrix @ self.form_basis.T

    @property
    def state_form(self) -> np.ndarray:
        """Symmetrized inverse of the map: the inner product on states."""
        k = np.linalg.inv(self.matrix)
        return 0.5 * (k + k.T)

    def __call__(self, e: np.ndarray) -> np.ndarray:
        return self.matrix @ e


class FaceSelfDuality(Report):
    face: str = Field(description="Face label")
    rank: int = Field(description="Dimension of the face's linear span")
    self_dual: bool = Field(description="Whether the face is self-dual under the restricted form")
    worst_margin: float = Field(description="Largest ray mismatch or boundary margin observed")


class SelfDualityReport(Report):
    """Outcome of the perfection pipeline."""

    model: dict = Field(description="Model spec")
    phi_label: str = Field(description="How the order isomorphism was obtained")
    perfect: bool = Field(description="Cone and every checked face are self-dual")
    cone_self_dual: Optional[bool] = Field(None, description="Self-duality of the whole cone")
    cone_margin: Optional[float] = Field(None, description="Worst margin of the cone check")
    face_reports: list[FaceSelfDuality] = Field(default_factory=list)
    gram_min_eigenvalue: float = Field(description="Smallest eigenvalue of the symmetrized form")
    gram_asymmetry: float = Field(description="Largest entry of gram - gram^T")
    method: str = Field("sampled", description="exact for finitely generated cones, sampled otherwise")
    notes: list[str] = Field(default_factory=list)


class OrthotracialReport(Report):
    """States fixed by P_F + P_F' for every face F (exploratory)."""

    model: dict
    dimension: int
    basis: list[list[float]]
    contains_unit: bool = Field(description="Whether phi(u) lies in the subspace")
    faces: int
    exploratory: bool = True


# --- building phi -------------------------------------------------------------


def sample_atomic_basis(sys: SystemModel, seed: int = 0, max_draws: int = MAX_DRAWS) -> list[AtomicEffect]:
    """Greedy rank-increasing selection of sampled atoms.

    Raises:
        NotABasis: no spanning set found within ``max_draws`` samples
        ModelUnsupported: the model cannot pair atoms with states
    """
    rng = rng_for(seed)
    chosen: list[np.ndarray] = []
    for _ in range(max_draws):
        atom = sys.sample_atom(rng)
        if np.linalg.matrix_rank(np.vstack(chosen + [atom]), tol=1e-8) == len(chosen) + 1:
            chosen.append(atom)
            if len(chosen) == sys.dim:
                return [AtomicEffect(EffectVec(a), StateVec(sys.hat(a))) for a in chosen]
    raise NotABasis(f"only {len(chosen)} independent atoms in {max_draws} draws")


def build_phi(sys: SystemModel, basis: list[AtomicEffect], label: str = "atomic-basis") -> PhiMap:
    """Linear extension of w_i -> hat(w_i).

    Raises:
        NotABasis: the atoms are not linearly independent
        NotAtomic: some basis element is not atomic
    """
    w = np.vstack([b.effect.coords for b in basis])
    if w.shape != (sys.dim, sys.dim) or np.linalg.matrix_rank(w, tol=1e-8) < sys.dim:
        raise NotABasis(f"{len(basis)} atoms do not form a basis of a {sys.dim}-dimensional space")
    for b in basis:
        if not sys.is_atomic(b.effect.coords):
            raise NotAtomic("basis element is not an atomic effect")
    hats = np.vstack([b.hat_state.coords for b in basis])
    matrix = np.linalg.solve(w, hats).T
    return PhiMap(matrix, w, w, label)


def forced_order_isomorphism(sys: SystemModel) -> PhiMap:
    """Linear map taking normalized facets bijectively onto vertices.

    Among all consistent bijections the most symmetric one is returned. When
    the counts differ no bijection exists and the standard embedding is used.

    Raises:
        ModelUnsupported: the model has no finite list of facets
    """
    facets = getattr(sys, "facets", None)
    vertices = getattr(sys, "vertices", None)
    if facets is None or vertices is None:
        raise ModelUnsupported(f"{sys.kind.value} has no facet list")
    if len(facets) != len(vertices):
        logger.warning(
            "[perfection] %d facets and %d vertices admit no bijection; using the standard embedding",
            len(facets), len(vertices),
        )
        return PhiMap(np.eye(sys.dim), facets, np.eye(sys.dim), "standard-embedding")
    n = len(facets)
    budget = getattr(sys, "budget", 2_000_000)
    if math.perm(n) > budget:
        raise EnumerationBudgetExceeded(f"{math.perm(n)} bijections exceed the budget of {budget}")
    best: Optional[np.ndarray] = None
    best_asymmetry = np.inf
    for order in itertools.permutations(range(n)):
        target = vertices[list(order)]
        solution, *_ = np.linalg.lstsq(facets, target, rcond=None)
        matrix = solution.T
        if np.max(np.abs(facets @ matrix.T - target)) > 1e-9:
            continue
        asymmetry = float(np.max(np.abs(matrix - matrix.T)))
        if asymmetry < best_asymmetry - 1e-12:
            best, best_asymmetry = matrix, asymmetry
    if best is None:
        raise ModelUnsupported("no linear map sends the facets onto the vertices")
    return PhiMap(best, facets, np.eye(sys.dim), "forced-order-isomorphism")


def phi_for(sys: SystemModel, seed: int = 0) -> PhiMap:
    """phi from a sampled atomic basis, or the forced isomorphism for polytopes."""
    try:
        return build_phi(sys, sample_atomic_basis(sys, seed))
    except ModelUnsupported as exc:
        logger.info("[perfection] atomic basis unavailable (%s); forcing an order isomorphism", exc)
        return forced_order_isomorphism(sys)


# --- checks -------------------------------------------------------------------


def check_basis_independence(
    sys: SystemModel, n_bases: int = 5, seed: int = 0, n_atoms: int = 20, tol: Tolerances = DEFAULT_TOLERANCES
) -> CheckReport:
    """phi built from different atomic bases agrees, and sends fresh atoms to their hats."""
    try:
        phis = [build_phi(sys, sample_atomic_basis(sys, derive_seed(seed, i))) for i in range(n_bases)]
    except ModelUnsupported as exc:
        return CheckReport(check="basis_independence", holds=False, notes=[str(exc)])
    deviation = max(
        (float(np.max(np.abs(a.matrix - b.matrix))) for a, b in itertools.combinations(phis, 2)),
        default=0.0,
    )
    rng = rng_for(seed, n_bases)
    hat_error = 0.0
    for _ in range(n_atoms):
        atom = sys.sample_atom(rng)
        hat_error = max(hat_error, float(np.max(np.abs(phis[0](atom) - sys.hat(atom)))))
    worst = max(deviation, hat_error)
    holds = worst < tol.sampled * 10
    logger.info("[perfection] basis deviation %.3g, hat error %.3g", deviation, hat_error)
    return CheckReport(
        check="basis_independence",
        holds=holds,
        samples=n_bases,
        worst_margin=worst,
        witness=None if holds else {"deviation": deviation, "hat_error": hat_error},
    )


def check_inner_product(phi: PhiMap, tol: Tolerances = DEFAULT_TOLERANCES) -> CheckReport:
    """Symmetry and positive definiteness of the form on effects."""
    asymmetry = float(np.max(np.abs(phi.gram - phi.gram.T)))
    values = np.linalg.eigvalsh(0.5 * (phi.gram + phi.gram.T))
    positive = values[0] > tol.map * max(1.0, float(values[-1]))
    holds = asymmetry < tol.map * 100 and positive
    return CheckReport(
        check="inner_product",
        holds=bool(holds),
        samples=1,
        worst_margin=float(values[0]),
        method="exact",
        witness=None if holds else {"eigenvalues": to_list(values), "asymmetry": asymmetry},
    )


def check_compression_symmetry(
    phi: PhiMap,
    filters: list[Filter],
    sys: SystemModel,
    samples: int = 20,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CheckReport:
    """Filters are symmetric under the state form, and hats of atoms fixed by P* are fixed by P."""
    k = phi.state_form
    rng = rng_for(seed)
    worst = 0.0
    worst_atom = 0.0
    for f in filters:
        p = f.map.matrix
        for _ in range(samples):
            a, b = sys.sample_state(rng), sys.sample_state(rng)
            worst = max(worst, abs(float((p @ a) @ k @ b - a @ k @ (p @ b))))
        for omega in sys.face_pure_states(f.face, 4, rng):
            w = sys.tilde(omega)
            if np.max(np.abs(p.T @ w - w)) <= tol.map * 100:
                image = phi(w)
                worst_atom = max(worst_atom, float(np.max(np.abs(p @ image - image))))
    holds = worst < tol.sampled and worst_atom < tol.sampled
    return CheckReport(
        check="compression_symmetry",
        holds=holds,
        samples=len(filters) * samples,
        worst_margin=max(worst, worst_atom),
        witness=None if holds else {"form_asymmetry": worst, "atom_image_error": worst_atom},
    )


def _exact_self_dual(rays: np.ndarray, form: np.ndarray) -> tuple[bool, float]:
    try:
        dual = polyhedral.dual_cone(rays, form)
    except (SingularInnerProduct, DegenerateInput) as exc:
        logger.debug("[perfection] dual cone failed: %s", exc)
        return False, np.inf
    return polyhedral.rays_equal(dual, rays, tol=1e-7), polyhedral.ray_mismatch(dual, rays)


def _sampled_self_dual(
    sys: SystemModel, face: Optional[Face], k: np.ndarray, states: np.ndarray, tol: Tolerances
) -> tuple[bool, float]:
    """Pure states pair nonnegatively with the face and sit on its boundary under K."""
    worst = 0.0
    for omega in states:
        e = k @ omega
        lo, _ = sys.effect_range(e) if face is None else sys.face_effect_range(face, e)
        worst = max(worst, abs(lo))
    return worst <= tol.sampled * 10, worst


def _face_check(
    sys: SystemModel, face: Face, k: np.ndarray, rng: np.random.Generator, tol: Tolerances
) -> FaceSelfDuality:
    span = sys.face_span(face)
    restricted = span.T @ k @ span
    if face.rank == 1:
        omega = sys.face_pure_states(face, 1, rng)[0]
        value = float(omega @ k @ omega)
        return FaceSelfDuality(face=face.label, rank=1, self_dual=value > 0, worst_margin=value)
    if sys.finite_extreme_rays:
        rays = np.vstack([v for v in sys.pure_net() if sys.face_leq(sys.face_of(v), face)])
        ok, margin = _exact_self_dual(rays @ span, restricted)
    else:
        # functional on lin F, extended by zero off the span
        form = span @ restricted @ span.T
        ok, margin = _sampled_self_dual(sys, face, form, sys.face_pure_states(face, 16, rng), tol)
    return FaceSelfDuality(face=face.label, rank=face.rank, self_dual=ok, worst_margin=float(margin))


def check_perfection(
    sys: SystemModel,
    phi: PhiMap,
    face_cap: int = 200,
    lattice_cap: int = 1024,
    samples: int = 64,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> SelfDualityReport:
    """Self-duality of the cone and of each enumerated face under the form induced by phi."""
    gram_check = check_inner_product(phi, tol)
    values = np.linalg.eigvalsh(0.5 * (phi.gram + phi.gram.T))
    report = SelfDualityReport(
        model=sys.spec(),
        phi_label=phi.label,
        perfect=False,
        gram_min_eigenvalue=float(values[0]),
        gram_asymmetry=float(np.max(np.abs(phi.gram - phi.gram.T))),
        method="exact" if sys.finite_extreme_rays else "sampled",
    )
    if not gram_check.holds:
        report.notes.append("form is not a symmetric positive definite inner product; self-duality not tested")
        return report

    k = phi.state_form
    rng = rng_for(seed)
    if sys.finite_extreme_rays:
        cone_ok, cone_margin = _exact_self_dual(sys.pure_net(), k)
    else:
        states = np.vstack([sys.sample_pure(rng) for _ in range(samples)])
        cone_ok, cone_margin = _sampled_self_dual(sys, None, k, states, tol)
    report.cone_self_dual, report.cone_margin = bool(cone_ok), float(cone_margin)

    try:
        top, bottom = sys.top_face(), sys.bottom_face()
        faces = [
            f for f in sys.lattice_faces(lattice_cap, rng)
            if not (sys.face_equal(f, top) or sys.face_equal(f, bottom))
        ]
    except (LatticeTooLarge, ModelUnsupported) as exc:
        faces = []
        report.notes.append(f"faces not checked: {exc}")
    if len(faces) > face_cap:
        chosen = sorted(rng.choice(len(faces), size=face_cap, replace=False))
        faces = [faces[i] for i in chosen]
        report.notes.append(f"checked a uniform sample of {face_cap} faces")
    for face in faces:
        try:
            report.face_reports.append(_face_check(sys, face, k, rng, tol))
        except (NotProjective, ModelUnsupported) as exc:
            report.notes.append(f"face {face.label} skipped: {exc}")
    report.perfect = bool(cone_ok and all(f.self_dual for f in report.face_reports))
    logger.info(
        "[perfection] %s: cone self-dual=%s, %d faces checked, perfect=%s",
        sys.kind.value, cone_ok, len(report.face_reports), report.perfect,
    )
    return report


def perfection_pipeline(
    sys: SystemModel,
    seed: int = 0,
    n_bases: int = 5,
    face_cap: int = 200,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> SelfDualityReport:
    """phi, basis independence, inner product and self-duality, stopping at the first failure."""
    phi = phi_for(sys, seed)
    if phi.label == "atomic-basis":
        independence = check_basis_independence(sys, n_bases, seed, tol=tol)
        if not independence.holds:
            values = np.linalg.eigvalsh(0.5 * (phi.gram + phi.gram.T))
            return SelfDualityReport(
                model=sys.spec(),
                phi_label=phi.label,
                perfect=False,
                gram_min_eigenvalue=float(values[0]),
                gram_asymmetry=float(np.max(np.abs(phi.gram - phi.gram.T))),
                notes=[f"phi depends on the atomic basis (deviation {independence.worst_margin:.3g})"],
            )
    report = check_perfection(sys, phi, face_cap=face_cap, seed=seed, tol=tol)
    if phi.label == "standard-embedding":
        report.notes.append("no facet-vertex bijection exists; result is exploratory")
    return report


def _k_projection(span: np.ndarray, k: np.ndarray) -> np.ndarray:
    if span.shape[1] == 0:
        return np.zeros((k.shape[0], k.shape[0]))
    return span @ np.linalg.solve(span.T @ k @ span, span.T @ k)


def orthotracial_subspace(
    sys: SystemModel, phi: PhiMap, cap: int = 1024, seed: int = 0, tol: Tolerances = DEFAULT_TOLERANCES
) -> OrthotracialReport:
    """Common fixed space of P_F + P_F' over the face lattice, P_F K-orthogonal onto lin F.

    Raises:
        LatticeTooLarge: the face lattice exceeds ``cap``
    """
    k = phi.state_form
    faces = sys.lattice_faces(cap, rng_for(seed))
    blocks = [np.zeros((0, sys.dim))]
    for face in faces:
        p = _k_projection(sys.face_span(face), k)
        p_c = _k_projection(sys.face_span(sys.face_complement(face)), k)
        blocks.append(p + p_c - np.eye(sys.dim))
    basis = linalg.null_space(np.vstack(blocks), rcond=tol.sampled)
    image = phi(sys.unit)
    residual = image - basis @ (basis.T @ image) if basis.shape[1] else image
    return OrthotracialReport(
        model=sys.spec(),
        dimension=basis.shape[1],
        basis=to_list(basis.T),
        contains_unit=bool(np.max(np.abs(residual)) <= tol.map * 100),
        faces=len(faces),
    )
