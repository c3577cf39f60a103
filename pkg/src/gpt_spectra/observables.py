"""Spectral expansions of observables, step-function spectral families and Riemann sums."""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from pydantic import Field

from .configuration import DEFAULT_TOLERANCES, Tolerances
from .core import SystemModel
from .errors import GridOutOfBounds
from .perfection import PhiMap
from .reports import Report

logger = logging.getLogger(__name__)

@dataclass
class SpectralExpansion:
    """a = sum of lambda_i p_i over mutually orthogonal projective units, coefficients descending."""

    terms: list[tuple[float, np.ndarray]]
    nondegenerate: bool = True
    zero_unit: Optional[np.ndarray] = None  # projective unit of a dropped zero coefficient
    reconstruction_error: float = 0.0
    orthogonal: bool = True

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms])

    @property
    def units(self) -> list[np.ndarray]:
        return [p for _, p in self.terms]


def _order_norm(a: np.ndarray, sys: SystemModel) -> float:
    lo, hi = sys.effect_range(a)
    return max(abs(lo), abs(hi))


def spectral_expand(
    a: np.ndarray,
    sys: SystemModel,
    keep_zero: bool = False,
    rel_tol: Optional[float] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> SpectralExpansion:
    """Unique nondegenerate expansion of a dual-space element.

    Raises:
        ModelUnsupported: the model has no projective expansion
    """
    a = sys.check_dim(a)
    rel_tol = tol.degeneracy if rel_tol is None else rel_tol
    terms = sys.spectral_terms(a, rel_tol=rel_tol)
    scale = max(1.0, float(np.max(np.abs(a))))
    zero_unit = None
    if not keep_zero:
        kept = []
        for c, p in terms:
            if abs(c) <= rel_tol * scale:
                zero_unit = p
            else:
                kept.append((c, p))
        terms = kept
    reconstruction = sum((c * p for c, p in terms), np.zeros(sys.dim))
    error = float(np.max(np.abs(reconstruction - a)))
    if error > tol.map * scale * 100:
        logger.warning("[observables] expansion reconstructs the input only within %.3g", error)
    orthogonal = all(
        sys.effect_range(sys.unit - p - q)[0] >= -tol.sampled
        for i, (_, p) in enumerate(terms)
        for _, q in terms[i + 1:]
    )
    coefficients = [c for c, _ in terms]
    nondegenerate = all(abs(x - y) > rel_tol * scale for i, x in enumerate(coefficients) for y in coefficients[i + 1:])
    return SpectralExpansion(terms, nondegenerate, zero_unit, error, orthogonal)


@dataclass
class SpectralFamily:
    """Increasing chain of projective units 0 < e_1 < ... < e_n = u jumping at the thresholds."""

    thresholds: np.ndarray
    units: list[np.ndarray]  # units[0] is 0, units[j] is e at thresholds[j - 1]
    dim: int = field(default=0)

    def at(self, lam: float) -> np.ndarray:
        """e_lambda: sum of the units whose coefficient is at most lambda."""
        j = int(np.searchsorted(self.thresholds, lam, side="right"))
        return self.units[j]

    @property
    def length(self) -> int:
        return len(self.units)


def spectral_family(
    a: np.ndarray, sys: SystemModel, rel_tol: Optional[float] = None, tol: Tolerances = DEFAULT_TOLERANCES
) -> SpectralFamily:
    expansion = spectral_expand(a, sys, keep_zero=True, rel_tol=rel_tol, tol=tol)
    ordered = sorted(expansion.terms, key=lambda term: term[0])
    units = [np.zeros(sys.dim)]
    for _, p in ordered:
        units.append(units[-1] + p)
    if len(units) > sys.dim + 1:
        logger.warning("[observables] spectral family has %d units in dimension %d", len(units), sys.dim)
    return SpectralFamily(np.array([c for c, _ in ordered]), units, sys.dim)


class GridResult(Report):
    mesh: float = Field(description="Largest gap of the grid")
    error: float = Field(description="Order-unit norm of the Riemann sum minus the input")
    nonzero_differences: int = Field(description="Number of nonzero unit differences")
    fine: bool = Field(description="Whether the mesh is below theta")
    matches_expansion: bool = Field(description="Difference units equal the expansion's units")


class RiemannReport(Report):
    """Riemann sums of the spectral family over several grids."""

    theta: Optional[float] = Field(description="Shortest gap between thresholds")
    norm: float = Field(description="Order-unit norm of the input")
    grids: list[GridResult]
    holds: bool = Field(description="Every fine grid reconstructs within its mesh using the expansion's units")


def _same_units(found: list[np.ndarray], expected: list[np.ndarray], atol: float) -> bool:
    if len(found) != len(expected):
        return False
    return all(any(np.allclose(f, e, atol=atol) for e in expected) for f in found)


def riemann_stabilization_demo(
    a: np.ndarray, sys: SystemModel, grids: Sequence[Sequence[float]], tol: Tolerances = DEFAULT_TOLERANCES
) -> RiemannReport:
    """Riemann sums sum lambda_i (e_lambda_i - e_lambda_(i-1)) over each grid.

    Raises:
        GridOutOfBounds: a grid does not cover [-|a|, |a|] strictly or is not increasing
    """
    a = sys.check_dim(a)
    norm = _order_norm(a, sys)
    family = spectral_family(a, sys, tol=tol)
    expected = spectral_expand(a, sys, keep_zero=True, tol=tol).units
    gaps = np.diff(family.thresholds)
    theta = float(gaps.min()) if len(gaps) else None
    results = []
    holds = True
    for grid in grids:
        g = np.asarray(grid, dtype=float)
        if len(g) < 2 or np.any(np.diff(g) <= 0):
            raise GridOutOfBounds("grids must be strictly increasing with at least two points")
        if not (g[0] < -norm and g[-1] > norm):
            raise GridOutOfBounds(f"grid [{g[0]}, {g[-1]}] does not strictly contain [-{norm}, {norm}]")
        mesh = float(np.max(np.diff(g)))
        s = np.zeros(sys.dim)
        differences = []
        for lo, hi in zip(g[:-1], g[1:]):
            d = family.at(hi) - family.at(lo)
            if np.max(np.abs(d)) > tol.linear:
                differences.append(d)
                s += hi * d
        error = _order_norm(s - a, sys)
        fine = theta is None or mesh < theta
        matches = _same_units(differences, expected, tol.sampled)
        if fine and (error > mesh + tol.sampled or not matches):
            holds = False
        results.append(
            GridResult(mesh=mesh, error=error, nonzero_differences=len(differences), fine=fine, matches_expansion=matches)
        )
    logger.info("[observables] %d grids, theta=%s, holds=%s", len(results), theta, holds)
    return RiemannReport(theta=theta, norm=norm, grids=results, holds=holds)


@dataclass
class StateExpansion:
    """x = sum of lambda_i omega_i over mutually orthogonal pure states."""

    terms: list[tuple[float, np.ndarray]]
    reconstruction_error: float
    orthogonal: bool


def finegrained_state_expansion(
    x: np.ndarray, sys: SystemModel, phi: PhiMap, tol: Tolerances = DEFAULT_TOLERANCES
) -> StateExpansion:
    """Expand phi^-1(x), refine each unit into atoms and carry the atoms back through hat.

    Within a degenerate coefficient the choice of atoms is up to the model's refinement.
    """
    x = sys.check_dim(x)
    a = np.linalg.solve(phi.matrix, x)
    terms: list[tuple[float, np.ndarray]] = []
    for c, p in spectral_expand(a, sys, tol=tol).terms:
        for atom in sys.atomic_refinement(p):
            terms.append((c, sys.hat(atom)))
    reconstruction = sum((c * omega for c, omega in terms), np.zeros(sys.dim))
    error = float(np.max(np.abs(reconstruction - x)))
    faces = [sys.face_of(omega) for _, omega in terms]
    orthogonal = all(
        sys.face_leq(f, sys.face_complement(g))
        for i, f in enumerate(faces)
        for g in faces[i + 1:]
    )
    return StateExpansion(terms, error, orthogonal)
