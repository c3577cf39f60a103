"""Shared structure of strictly convex state spaces.

Every boundary point of a strictly convex, smooth body is a pure state with a
unique antipode, so the face lattice is {0, points, Omega}, each point face has
the rank-one filter x -> tilde(w)(x) w, and every dual element expands into at
most two projective units.
"""

from abc import abstractmethod
from typing import Optional

import numpy as np

from ..core import Face, SystemModel
from ..errors import NotAtomic, NotProjective

POINT_NET = 12


class StrictlyConvexModel(SystemModel):
    """Base class for the ball and the planar support-function bodies."""

    n_max = 2

    @abstractmethod
    def antipode(self, omega: np.ndarray) -> np.ndarray:
        """The unique pure state perfectly distinguishable from pure ``omega``."""

    def maximizing_pure_state(self, e: np.ndarray) -> np.ndarray:
        return self.minimizing_pure_state(-np.asarray(e, dtype=float))

    def is_atomic(self, e: np.ndarray, tol: float = 1e-9) -> bool:
        lo, hi = self.effect_range(e)
        return abs(hi - 1.0) <= tol and abs(lo) <= tol

    def hat(self, e: np.ndarray) -> np.ndarray:
        if not self.is_atomic(e):
            raise NotAtomic("effect is not a maximal effect on an extreme ray")
        return self.maximizing_pure_state(e)

    def distinguishing_candidate(self, states: np.ndarray) -> Optional[np.ndarray]:
        if len(states) != 2 or not all(self.is_pure(s) for s in states):
            return None
        if not np.allclose(self.antipode(states[0]), states[1], atol=1e-9):
            return None
        return np.vstack([self.tilde(states[0]), self.tilde(states[1])])

    # --- faces ---

    def _point(self, omega: np.ndarray) -> Face:
        omega = np.asarray(omega, dtype=float)
        return Face(("point",) + tuple(np.round(omega, 8)), 1, "point", data=omega)

    def top_face(self) -> Face:
        return Face(("top",), self.dim, "state space")

    def bottom_face(self) -> Face:
        return Face(("bottom",), 0, "empty")

    def face_of(self, x: np.ndarray) -> Face:
        mass = float(self.unit @ x)
        if mass <= 1e-12:
            return self.bottom_face()
        if self.cone_margin(x / mass) > 1e-9:
            return self.top_face()
        return self._point(x / mass)

    def face_equal(self, f: Face, g: Face) -> bool:
        if f.key[0] != g.key[0]:
            return False
        if f.key[0] != "point":
            return True
        return bool(np.allclose(f.data, g.data, atol=1e-8))

    def face_complement(self, face: Face) -> Face:
        if face.key[0] == "point":
            return self._point(self.antipode(face.data))
        return self.bottom_face() if face.key[0] == "top" else self.top_face()

    def face_join(self, f: Face, g: Face) -> Face:
        if f.key[0] == "bottom":
            return g
        if g.key[0] == "bottom":
            return f
        return f if self.face_equal(f, g) else self.top_face()

    def face_meet(self, f: Face, g: Face) -> Face:
        if f.key[0] == "top":
            return g
        if g.key[0] == "top":
            return f
        return f if self.face_equal(f, g) else self.bottom_face()

    def face_leq(self, f: Face, g: Face) -> bool:
        return f.key[0] == "bottom" or g.key[0] == "top" or self.face_equal(f, g)

    def face_effect_range(self, face: Face, e: np.ndarray) -> tuple[float, float]:
        if face.key[0] == "point":
            value = float(e @ face.data)
            return value, value
        if face.key[0] == "top":
            return self.effect_range(e)
        raise NotProjective("the zero face has no normalized states")

    def face_pure_states(self, face: Face, count: int, rng: np.random.Generator) -> np.ndarray:
        if face.key[0] == "point":
            return np.tile(face.data, (count, 1))
        if face.key[0] == "top":
            return np.vstack([self.sample_pure(rng) for _ in range(count)])
        return np.zeros((0, self.dim))

    def lattice_faces(self, cap: int, rng: np.random.Generator) -> list[Face]:
        faces = [self.bottom_face(), self.top_face()]
        for _ in range(min(POINT_NET, max(0, (cap - 2) // 2))):
            omega = self.sample_pure(rng)
            faces.extend([self._point(omega), self._point(self.antipode(omega))])
        return faces

    def filter_pair(self, face: Face) -> tuple[np.ndarray, np.ndarray]:
        if face.key[0] == "top":
            return np.eye(self.dim), np.zeros((self.dim, self.dim))
        if face.key[0] == "bottom":
            return np.zeros((self.dim, self.dim)), np.eye(self.dim)
        omega = face.data
        opposite = self.antipode(omega)
        return np.outer(omega, self.tilde(omega)), np.outer(opposite, self.tilde(opposite))

    def face_span(self, face: Face) -> np.ndarray:
        if face.key[0] == "top":
            return np.eye(self.dim)
        if face.key[0] == "bottom":
            return np.zeros((self.dim, 0))
        return (face.data / np.linalg.norm(face.data))[:, None]

    # --- dual-space spectral structure ---

    def spectral_terms(self, a: np.ndarray, rel_tol: float = 1e-9) -> list[tuple[float, np.ndarray]]:
        top = self.maximizing_pure_state(a)
        bottom = self.antipode(top)
        high, low = float(a @ top), float(a @ bottom)
        if abs(high - low) <= rel_tol * max(1.0, abs(high), abs(low)):
            return [(high, self.unit.copy())]
        return [(high, self.tilde(top)), (low, self.tilde(bottom))]

    def atomic_refinement(self, p: np.ndarray) -> list[np.ndarray]:
        if np.allclose(p, 0.0, atol=1e-9):
            return []
        if np.allclose(p, self.unit, atol=1e-9):
            omega = self.reference_pure_state()
            return [self.tilde(omega), self.tilde(self.antipode(omega))]
        if self.is_atomic(p):
            return [np.array(p, dtype=float)]
        raise NotProjective("effect is not a projective unit")
