"""Classical simplex: nonnegative orthant with the coordinate-sum unit."""

import itertools
from typing import Optional

import numpy as np

from ..core import Face, ModelKind, SystemModel
from ..errors import InvalidAxis, LatticeTooLarge, NotAtomic, NotPure, NotProjective

GROUP_LIMIT = 7


class ClassicalModel(SystemModel):
    """Probability simplex on ``n`` outcomes."""

    kind = ModelKind.CLASSICAL

    def __init__(self, n: int):
        if int(n) < 1:
            raise InvalidAxis(f"classical model needs n >= 1, got {n}")
        super().__init__(int(n), np.ones(int(n)), {"n": int(n)})
        self.n_max = self.dim

    @property
    def finite_extreme_rays(self) -> bool:
        return True

    def cone_margin(self, x: np.ndarray) -> float:
        return float(np.min(x))

    def effect_range(self, e: np.ndarray) -> tuple[float, float]:
        return float(np.min(e)), float(np.max(e))

    def minimizing_pure_state(self, e: np.ndarray) -> np.ndarray:
        return np.eye(self.dim)[int(np.argmin(e))]

    def sample_pure(self, rng: np.random.Generator) -> np.ndarray:
        return np.eye(self.dim)[rng.integers(self.dim)]

    def sample_state(self, rng: np.random.Generator) -> np.ndarray:
        return rng.dirichlet(np.ones(self.dim))

    def pure_net(self, size: int = 256) -> np.ndarray:
        return np.eye(self.dim)

    def is_pure(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return abs(x.sum() - 1.0) <= tol and float(np.max(x)) >= 1.0 - tol

    def reference_pure_state(self) -> np.ndarray:
        return np.eye(self.dim)[0]

    def special_states(self) -> list[np.ndarray]:
        return [np.full(self.dim, 1.0 / self.dim)]

    def decompose(self, x: np.ndarray) -> list[tuple[float, np.ndarray]]:
        basis = np.eye(self.dim)
        return [(float(p), basis[i]) for i, p in enumerate(x) if p > 0]

    def distinguishing_candidate(self, states: np.ndarray) -> Optional[np.ndarray]:
        supports = states > 1e-12
        if np.any(supports.sum(axis=0) > 1):
            return None
        rows = supports.astype(float)
        rows[-1] += 1.0 - rows.sum(axis=0)
        return rows

    def _basis_index(self, v: np.ndarray, tol: float) -> Optional[int]:
        i = int(np.argmax(v))
        return i if np.allclose(v, np.eye(self.dim)[i], atol=tol) else None

    def tilde(self, omega: np.ndarray) -> np.ndarray:
        i = self._basis_index(omega, 1e-9)
        if i is None:
            raise NotPure("classical pure states are the basis vectors")
        return np.eye(self.dim)[i]

    def hat(self, e: np.ndarray) -> np.ndarray:
        i = self._basis_index(e, 1e-9)
        if i is None:
            raise NotAtomic("classical atoms are the coordinate functionals")
        return np.eye(self.dim)[i]

    def is_atomic(self, e: np.ndarray, tol: float = 1e-9) -> bool:
        return self._basis_index(e, tol) is not None

    def sample_reversible(self, rng: np.random.Generator) -> np.ndarray:
        return np.eye(self.dim)[:, rng.permutation(self.dim)]

    def reversible_between(self, source: np.ndarray, target: np.ndarray) -> Optional[np.ndarray]:
        i, j = self._basis_index(source, 1e-9), self._basis_index(target, 1e-9)
        if i is None or j is None:
            return None
        perm = np.arange(self.dim)
        perm[[i, j]] = perm[[j, i]]
        return np.eye(self.dim)[perm]

    def symmetry_group(self) -> Optional[list[np.ndarray]]:
        if self.dim > GROUP_LIMIT:
            return None
        eye = np.eye(self.dim)
        return [eye[:, list(p)] for p in itertools.permutations(range(self.dim))]

    # Faces are coordinate subsets.

    def _face(self, indices) -> Face:
        key = tuple(sorted(int(i) for i in indices))
        return Face(key, len(key), "{" + ",".join(str(i + 1) for i in key) + "}")

    def face_of(self, x: np.ndarray) -> Face:
        return self._face(np.flatnonzero(x > 1e-12))

    def top_face(self) -> Face:
        return self._face(range(self.dim))

    def bottom_face(self) -> Face:
        return self._face(())

    def face_complement(self, face: Face) -> Face:
        return self._face(set(range(self.dim)) - set(face.key))

    def face_join(self, f: Face, g: Face) -> Face:
        return self._face(set(f.key) | set(g.key))

    def face_meet(self, f: Face, g: Face) -> Face:
        return self._face(set(f.key) & set(g.key))

    def face_leq(self, f: Face, g: Face) -> bool:
        return set(f.key) <= set(g.key)

    def face_effect_range(self, face: Face, e: np.ndarray) -> tuple[float, float]:
        if not face.key:
            raise NotProjective("the empty face has no normalized states")
        values = e[list(face.key)]
        return float(values.min()), float(values.max())

    def face_pure_states(self, face: Face, count: int, rng: np.random.Generator) -> np.ndarray:
        if not face.key:
            return np.zeros((0, self.dim))
        return np.eye(self.dim)[rng.choice(face.key, size=count)]

    def lattice_faces(self, cap: int, rng: np.random.Generator) -> list[Face]:
        if 2**self.dim > cap:
            raise LatticeTooLarge(f"classical({self.dim}) lattice has {2**self.dim} faces, cap is {cap}")
        return [
            self._face(subset)
            for r in range(self.dim + 1)
            for subset in itertools.combinations(range(self.dim), r)
        ]

    def filter_pair(self, face: Face) -> tuple[np.ndarray, np.ndarray]:
        mask = np.zeros(self.dim)
        mask[list(face.key)] = 1.0
        return np.diag(mask), np.diag(1.0 - mask)

    def face_span(self, face: Face) -> np.ndarray:
        return np.eye(self.dim)[:, list(face.key)]

    def spectral_terms(self, a: np.ndarray, rel_tol: float = 1e-9) -> list[tuple[float, np.ndarray]]:
        scale = max(1.0, float(np.max(np.abs(a))))
        order = np.argsort(-a, kind="stable")
        terms: list[tuple[float, np.ndarray]] = []
        for i in order:
            if terms and abs(terms[-1][0] - a[i]) <= rel_tol * scale:
                terms[-1][1][i] = 1.0
                continue
            unit = np.zeros(self.dim)
            unit[i] = 1.0
            terms.append((float(a[i]), unit))
        return terms

    def atomic_refinement(self, p: np.ndarray) -> list[np.ndarray]:
        if not np.allclose(p, np.round(p), atol=1e-9) or np.any(np.round(p) < 0) or np.any(np.round(p) > 1):
            raise NotProjective("classical projective units are 0/1 indicator vectors")
        return [np.eye(self.dim)[i] for i in np.flatnonzero(np.round(p) == 1)]
