"""Polytopal models: square bit, triangular bipyramid and user-supplied polytopes."""

import itertools
import logging
import math
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy import linalg
from scipy.optimize import linprog

from .. import polyhedral
from ..core import Face, ModelKind, SystemModel, perfectly_distinguishable
from ..errors import (
    DecompositionUnavailable,
    EnumerationBudgetExceeded,
    ModelUnsupported,
    NotAtomic,
    NotPure,
    NotProjective,
)

logger = logging.getLogger(__name__)

SQUARE_VERTICES = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]


def bipyramid_vertices() -> list[list[float]]:
    """Origin-centred equilateral triangle in z = 0 plus the poles (0, 0, +-1)."""
    triangle = [
        [float(np.cos(2 * np.pi * k / 3)), float(np.sin(2 * np.pi * k / 3)), 0.0]
        for k in range(3)
    ]
    return triangle + [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]


class PolytopeModel(SystemModel):
    """State space given as the convex hull of finitely many vertices."""

    def __init__(
        self,
        vertices: Sequence[Sequence[float]],
        kind: ModelKind = ModelKind.POLYHEDRAL,
        enumeration_budget: int = 2_000_000,
    ):
        self.kind = kind
        self.budget = int(enumeration_budget)
        self.spec_poly = polyhedral.facet_enumerate(vertices, budget=self.budget)
        params = {} if kind is not ModelKind.POLYHEDRAL else {"vertices": [list(map(float, v)) for v in vertices]}
        unit = np.zeros(self.spec_poly.dim)
        unit[0] = 1.0
        super().__init__(self.spec_poly.dim, unit, params)
        self._subset_cache: dict[tuple[int, ...], bool] = {}

    @property
    def vertices(self) -> np.ndarray:
        return self.spec_poly.vertices

    @property
    def facets(self) -> np.ndarray:
        return self.spec_poly.facets

    @property
    def finite_extreme_rays(self) -> bool:
        return True

    # --- cone and effects ---

    def cone_margin(self, x: np.ndarray) -> float:
        return float(np.min(self.facets @ x))

    def effect_range(self, e: np.ndarray) -> tuple[float, float]:
        values = self.vertices @ e
        return float(values.min()), float(values.max())

    def minimizing_pure_state(self, e: np.ndarray) -> np.ndarray:
        return self.vertices[int(np.argmin(self.vertices @ e))].copy()

    def map_positivity_margin(self, matrix: np.ndarray, net_size: int = 256) -> float:
        return float(np.min(self.facets @ matrix @ self.vertices.T))

    # --- states ---

    def sample_pure(self, rng: np.random.Generator) -> np.ndarray:
        return self.vertices[rng.integers(len(self.vertices))].copy()

    def sample_state(self, rng: np.random.Generator) -> np.ndarray:
        return rng.dirichlet(np.ones(len(self.vertices))) @ self.vertices

    def pure_net(self, size: int = 256) -> np.ndarray:
        return self.vertices

    def vertex_index(self, x: np.ndarray, tol: float = 1e-9) -> Optional[int]:
        distances = np.linalg.norm(self.vertices - x, axis=1)
        i = int(np.argmin(distances))
        return i if distances[i] <= tol else None

    def is_pure(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return self.vertex_index(x, tol) is not None

    def reference_pure_state(self) -> np.ndarray:
        return self.vertices[0].copy()

    def special_states(self) -> list[np.ndarray]:
        return [self.vertices.mean(axis=0)]

    # --- distinguishable vertex sets ---

    def subset_distinguishable(self, subset: tuple[int, ...]) -> bool:
        """Exact LP test for perfect distinguishability of a vertex subset."""
        if subset not in self._subset_cache:
            self._subset_cache[subset] = (
                perfectly_distinguishable(list(self.vertices[list(subset)]), self) is not None
            )
        return self._subset_cache[subset]

    @cached_property
    def distinguishable_subsets(self) -> list[tuple[int, ...]]:
        """All perfectly distinguishable vertex subsets, by size then lexicographically."""
        found: list[tuple[int, ...]] = []
        for size in range(1, self.dim + 1):
            level = [
                s for s in itertools.combinations(range(len(self.vertices)), size)
                if size == 1 or self.subset_distinguishable(s)
            ]
            if not level:
                break
            found.extend(level)
        return found

    @property
    def n_max(self) -> int:  # type: ignore[override]
        return max(len(s) for s in self.distinguishable_subsets)

    def decompositions(self, x: np.ndarray) -> list[list[tuple[float, np.ndarray]]]:
        if len(self.distinguishable_subsets) > self.budget:
            raise EnumerationBudgetExceeded("too many distinguishable subsets to enumerate")
        found: list[list[tuple[float, np.ndarray]]] = []
        supports: list[frozenset[int]] = []
        for subset in self.distinguishable_subsets:
            rays = self.vertices[list(subset)]
            weights, *_ = np.linalg.lstsq(rays.T, x, rcond=None)
            if np.max(np.abs(rays.T @ weights - x)) > 1e-10 or np.min(weights) < -1e-12:
                continue
            support = frozenset(i for i, w in zip(subset, weights) if w > 1e-12)
            if support in supports:
                continue
            supports.append(support)
            parts = [(float(w), self.vertices[i].copy()) for i, w in zip(subset, weights) if w > 1e-12]
            found.append(sorted(parts, key=lambda part: -part[0]))
        return found

    def decompose(self, x: np.ndarray) -> list[tuple[float, np.ndarray]]:
        found = self.decompositions(x)
        if not found:
            raise DecompositionUnavailable(
                "state lies in the convex hull of no perfectly distinguishable vertex set"
            )
        return found[0]

    # --- atoms: normalized facet functionals ---

    def _peak(self, facet: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        return np.flatnonzero(self.vertices @ facet >= 1.0 - tol)

    def is_atomic(self, e: np.ndarray, tol: float = 1e-9) -> bool:
        return bool(np.any(np.max(np.abs(self.facets - e), axis=1) <= tol))

    def tilde(self, omega: np.ndarray) -> np.ndarray:
        i = self.vertex_index(omega)
        if i is None:
            raise NotPure("polytope pure states are vertices")
        matches = [f for f in self.facets if list(self._peak(f)) == [i]]
        if len(matches) != 1:
            raise ModelUnsupported(
                f"{len(matches)} atomic effects take the value 1 only on this vertex; tilde needs exactly one"
            )
        return matches[0].copy()

    def hat(self, e: np.ndarray) -> np.ndarray:
        if not self.is_atomic(e):
            raise NotAtomic("effect is not a normalized facet functional")
        peak = self._peak(e)
        if len(peak) != 1:
            raise ModelUnsupported("atomic effect takes the value 1 on more than one vertex")
        return self.vertices[peak[0]].copy()

    def sample_atom(self, rng: np.random.Generator) -> np.ndarray:
        return self.facets[rng.integers(len(self.facets))].copy()

    # --- symmetries: linear maps permuting the vertices ---

    @cached_property
    def _group(self) -> list[np.ndarray]:
        vertices = self.vertices
        basis = []
        for i in range(len(vertices)):
            if np.linalg.matrix_rank(vertices[basis + [i]], tol=1e-9) == len(basis) + 1:
                basis.append(i)
            if len(basis) == self.dim:
                break
        n = len(vertices)
        count = math.perm(n, self.dim)
        if count > self.budget:
            raise EnumerationBudgetExceeded(f"{count} basis assignments exceed the budget")
        source_inv = np.linalg.inv(vertices[basis].T)
        group = []
        for images in itertools.permutations(range(n), self.dim):
            t = vertices[list(images)].T @ source_inv
            mapped = vertices @ t.T
            if all(self.vertex_index(m) is not None for m in mapped):
                group.append(t)
        logger.debug("[catalog] %s symmetry group has %d elements", self.kind.value, len(group))
        return group

    def symmetry_group(self) -> Optional[list[np.ndarray]]:
        return [g.copy() for g in self._group]

    def sample_reversible(self, rng: np.random.Generator) -> np.ndarray:
        return self._group[rng.integers(len(self._group))].copy()

    def reversible_between(self, source: np.ndarray, target: np.ndarray) -> Optional[np.ndarray]:
        for g in self._group:
            if np.allclose(g @ source, target, atol=1e-9):
                return g.copy()
        return None

    # --- faces: vertex-index sets ---

    def _face(self, indices) -> Face:
        key = tuple(sorted(int(i) for i in indices))
        rank = int(np.linalg.matrix_rank(self.vertices[list(key)], tol=1e-9)) if key else 0
        return Face(key, rank, "{" + ",".join(str(i) for i in key) + "}")

    def face_of(self, x: np.ndarray) -> Face:
        return self._face(polyhedral.face_of(x, self.spec_poly))

    def top_face(self) -> Face:
        return self._face(range(len(self.vertices)))

    def bottom_face(self) -> Face:
        return self._face(())

    def face_join(self, f: Face, g: Face) -> Face:
        indices = sorted(set(f.key) | set(g.key))
        if not indices:
            return self.bottom_face()
        return self.face_of(self.vertices[indices].mean(axis=0))

    def face_meet(self, f: Face, g: Face) -> Face:
        return self._face(set(f.key) & set(g.key))

    def face_leq(self, f: Face, g: Face) -> bool:
        return set(f.key) <= set(g.key)

    def face_effect_range(self, face: Face, e: np.ndarray) -> tuple[float, float]:
        if not face.key:
            raise NotProjective("the empty face has no normalized states")
        values = self.vertices[list(face.key)] @ e
        return float(values.min()), float(values.max())

    def face_pure_states(self, face: Face, count: int, rng: np.random.Generator) -> np.ndarray:
        if not face.key:
            return np.zeros((0, self.dim))
        return self.vertices[list(face.key)].copy()

    def lattice_faces(self, cap: int, rng: np.random.Generator) -> list[Face]:
        return [self._face(f) for f in polyhedral.face_lattice(self.spec_poly, cap)]

    def _separating_effect_exists(self, face: Face, vertex: int) -> bool:
        constraints_ub = np.vstack([-self.vertices, self.vertices])
        bounds_ub = np.concatenate([np.zeros(len(self.vertices)), np.ones(len(self.vertices))])
        a_eq = np.vstack([self.vertices[list(face.key)], self.vertices[[vertex]]])
        b_eq = np.concatenate([np.ones(len(face.key)), [0.0]])
        res = linprog(np.zeros(self.dim), A_ub=constraints_ub, b_ub=bounds_ub,
                      A_eq=a_eq, b_eq=b_eq, bounds=(None, None), method="highs")
        return res.status == 0

    def face_complement(self, face: Face) -> Face:
        """Face of all vertices perfectly distinguishable from ``face``."""
        if not face.key:
            return self.top_face()
        others = [
            v for v in range(len(self.vertices))
            if v not in face.key and self._separating_effect_exists(face, v)
        ]
        candidate = self._face(others)
        if others and not self.face_equal(self.face_join(candidate, candidate), candidate):
            raise NotProjective(
                f"vertices distinguishable from face {face.label} do not form a face"
            )
        return candidate

    def face_span(self, face: Face) -> np.ndarray:
        if not face.key:
            return np.zeros((self.dim, 0))
        return linalg.orth(self.vertices[list(face.key)].T)

    def filter_pair(self, face: Face) -> tuple[np.ndarray, np.ndarray]:
        """Oblique projections onto lin F along lin F' and back."""
        complement = self.face_complement(face)
        span, span_c = self.face_span(face), self.face_span(complement)
        if span.shape[1] + span_c.shape[1] != self.dim:
            raise NotProjective(f"lin F and lin F' do not span A for face {face.label}")
        basis = np.hstack([span, span_c])
        coords = np.linalg.inv(basis)
        k = span.shape[1]
        projection = span @ coords[:k]
        complement_projection = span_c @ coords[k:]
        if self.map_positivity_margin(projection) < -1e-9 or self.map_positivity_margin(complement_projection) < -1e-9:
            raise NotProjective(f"projection onto face {face.label} is not positive")
        return projection, complement_projection
