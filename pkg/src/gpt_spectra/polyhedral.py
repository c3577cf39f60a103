"""Polytopal state spaces: facets, face lattices and exact dual cones.

Vertices are affine points v in R^m; the cone is generated by the homogenized
rays (1, v) in A = R^(m+1). Facets are stored as normalized effects: linear
functionals that vanish on the facet and take maximum 1 over the vertices.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from .errors import (
    DegenerateInput,
    EnumerationBudgetExceeded,
    LatticeTooLarge,
    NotInCone,
    SingularInnerProduct,
)

logger = logging.getLogger(__name__)

MAX_VERTICES = 64
MAX_AMBIENT = 6


@dataclass
class PolytopeSpec:
    """V- and H-representation of a full-dimensional polytope."""

    vertices: np.ndarray  # homogenized, one per row
    facets: np.ndarray  # normalized facet functionals, one per row
    tight_sets: list[frozenset[int]] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def slack(self) -> np.ndarray:
        """Facet values on vertices, shape (facets, vertices)."""
        return self.facets @ self.vertices.T


def homogenize(points: Sequence[Sequence[float]]) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.hstack([np.ones((len(pts), 1)), pts])


def _cone_facets(
    rays: np.ndarray, tol: float, budget: int
) -> tuple[list[np.ndarray], list[frozenset[int]]]:
    """Facet normals of the cone spanned by ``rays`` by brute force over ray subsets."""
    n, dim = rays.shape
    combos = math.comb(n, dim - 1)
    if combos > budget:
        raise EnumerationBudgetExceeded(f"{combos} ray subsets exceed the budget of {budget}")
    scale = max(1.0, float(np.max(np.abs(rays))))
    normals: list[np.ndarray] = []
    tight: list[frozenset[int]] = []
    for subset in itertools.combinations(range(n), dim - 1):
        kernel = linalg.null_space(rays[list(subset)])
        if kernel.shape[1] != 1:
            continue
        c = kernel[:, 0]
        values = rays @ c
        if np.all(values >= -tol * scale):
            pass
        elif np.all(values <= tol * scale):
            c, values = -c, -values
        else:
            continue
        support = frozenset(np.flatnonzero(np.abs(values) <= tol * scale).tolist())
        if support in tight:
            continue
        if np.linalg.matrix_rank(rays[sorted(support)], tol=1e-9) != dim - 1:
            continue
        normals.append(c)
        tight.append(support)
    return normals, tight


def facet_enumerate(
    vertices: Sequence[Sequence[float]],
    tol: float = 1e-9,
    budget: int = 2_000_000,
) -> PolytopeSpec:
    """Complete irredundant facet list of conv(vertices).

    Raises:
        DegenerateInput: vertices are not full-dimensional; carries the affine
            hull (point and direction basis) and the facets within it
    """
    rays = homogenize(vertices)
    n, dim = rays.shape
    if n > MAX_VERTICES or dim - 1 > MAX_AMBIENT:
        raise EnumerationBudgetExceeded(
            f"{n} vertices in dimension {dim - 1} exceed the desk-scale limits"
        )
    rank = np.linalg.matrix_rank(rays, tol=1e-9)
    if rank < dim:
        points = rays[:, 1:]
        origin = points.mean(axis=0)
        directions = linalg.orth((points - origin).T) if n > 1 else np.zeros((dim - 1, 0))
        inner = None
        if directions.shape[1] >= 1:
            inner = facet_enumerate((points - origin) @ directions, tol, budget)
        raise DegenerateInput(
            f"vertices span an affine subspace of dimension {rank - 1} < {dim - 1}",
            affine_hull=(origin, directions),
            facets=inner,
        )
    normals, tight = _cone_facets(rays, tol, budget)
    facets = []
    for c in normals:
        facets.append(c / float(np.max(rays @ c)))
    logger.debug("[polyhedral] %d vertices, %d facets", n, len(facets))
    return PolytopeSpec(rays, np.array(facets), tight)


def face_lattice(spec: PolytopeSpec, cap: int = 1024) -> list[frozenset[int]]:
    """All faces as vertex-index sets, closed under intersection, bottom first."""
    top = frozenset(range(len(spec.vertices)))
    faces: set[frozenset[int]] = {top, *spec.tight_sets}
    frontier = set(spec.tight_sets)
    while frontier:
        new: set[frozenset[int]] = set()
        for f in frontier:
            for g in spec.tight_sets:
                meet = f & g
                if meet not in faces:
                    new.add(meet)
        faces |= new
        if len(faces) + 1 > cap:
            raise LatticeTooLarge(f"face lattice exceeds the cap of {cap}")
        frontier = new
    faces.add(frozenset())
    return sorted(faces, key=lambda f: (len(f), sorted(f)))


def face_of(x: np.ndarray, spec: PolytopeSpec, tol: float = 1e-9) -> frozenset[int]:
    """Smallest face containing the cone element ``x`` (tight-facet intersection)."""
    values = spec.facets @ x
    scale = max(1.0, float(abs(x[0])))
    if np.any(values < -tol * scale):
        raise NotInCone(f"point violates a facet by {float(-values.min()):.3g}")
    if abs(x[0]) <= tol:
        return frozenset()
    face = frozenset(range(len(spec.vertices)))
    for i in np.flatnonzero(values <= tol * scale):
        face &= spec.tight_sets[i]
    return face


def dual_face_of(e: np.ndarray, spec: PolytopeSpec, tol: float = 1e-9) -> frozenset[int]:
    """Smallest face of the dual cone containing the effect ``e``, as facet indices."""
    values = spec.vertices @ e
    if np.any(values < -tol):
        raise NotInCone("functional is negative on a vertex")
    zero_face = frozenset(np.flatnonzero(np.abs(values) <= tol).tolist())
    return frozenset(i for i, t in enumerate(spec.tight_sets) if zero_face <= t)


def _check_inner_product(inner_product: Optional[np.ndarray], dim: int) -> np.ndarray:
    if inner_product is None:
        return np.eye(dim)
    g = np.asarray(inner_product, dtype=float)
    if g.shape != (dim, dim) or not np.allclose(g, g.T, atol=1e-10):
        raise SingularInnerProduct("inner product must be a symmetric matrix of matching size")
    if np.linalg.cond(g) > 1e12:
        raise SingularInnerProduct("inner product matrix is singular")
    return g


def dual_cone(
    rays: np.ndarray,
    inner_product: Optional[np.ndarray] = None,
    tol: float = 1e-9,
    budget: int = 2_000_000,
) -> np.ndarray:
    """Unit-length generating rays of {y : (y, x) >= 0 for every ray x}.

    With (y, x) = y^T G x the internal dual is G^-1 applied to the standard
    dual, whose extreme rays are the facet normals of the cone.
    """
    rays = np.atleast_2d(np.asarray(rays, dtype=float))
    dim = rays.shape[1]
    g = _check_inner_product(inner_product, dim)
    if np.linalg.matrix_rank(rays, tol=1e-9) < dim:
        raise DegenerateInput("rays do not span the space")
    if dim == 1:
        normals = [np.sign(rays[np.argmax(np.abs(rays[:, 0])), 0:1])]
    else:
        normals, _ = _cone_facets(rays, tol, budget)
    out = np.array([np.linalg.solve(g, c) for c in normals])
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def rays_equal(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    """Ray-set equality up to positive scaling."""
    a = np.atleast_2d(a) / np.linalg.norm(np.atleast_2d(a), axis=1, keepdims=True)
    b = np.atleast_2d(b) / np.linalg.norm(np.atleast_2d(b), axis=1, keepdims=True)
    if len(a) != len(b):
        return False
    return all(np.min(np.linalg.norm(b - r, axis=1)) <= tol for r in a) and all(
        np.min(np.linalg.norm(a - r, axis=1)) <= tol for r in b
    )


def ray_mismatch(a: np.ndarray, b: np.ndarray) -> float:
    """Largest distance from a unit ray of one set to the nearest of the other."""
    a = np.atleast_2d(a) / np.linalg.norm(np.atleast_2d(a), axis=1, keepdims=True)
    b = np.atleast_2d(b) / np.linalg.norm(np.atleast_2d(b), axis=1, keepdims=True)
    return float(
        max(
            max(np.min(np.linalg.norm(b - r, axis=1)) for r in a),
            max(np.min(np.linalg.norm(a - r, axis=1)) for r in b),
        )
    )
