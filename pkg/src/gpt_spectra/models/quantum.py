"""Quantum systems: Hermitian d x d matrices in an orthonormal Hermitian basis.

Coordinates are taken against the basis {E_jj} + {(E_jk + E_kj)/sqrt 2} +
{i(E_kj - E_jk)/sqrt 2}, so the trace pairing tr(EX) is the dot product of
coordinate vectors and the order unit (the trace) has coordinates (1,..,1,0,..).
"""

from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import linalg

from ..core import Face, ModelKind, SystemModel
from ..errors import InvalidAxis, LatticeTooLarge, NotAtomic, NotPure, NotProjective

LATTICE_MAX_D = 3


@lru_cache(maxsize=None)
def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal basis of Herm(d) under the trace inner product, shape (d*d, d, d)."""
    basis = []
    for j in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[j, j] = 1.0
        basis.append(m)
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1 / np.sqrt(2)
            basis.append(m)
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = -1j / np.sqrt(2)
            m[k, j] = 1j / np.sqrt(2)
            basis.append(m)
    out = np.array(basis)
    out.setflags(write=False)
    return out


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def _unitary_with_first_column(psi: np.ndarray) -> np.ndarray:
    d = len(psi)
    q, _ = np.linalg.qr(np.column_stack([psi, np.eye(d)]))
    q = q[:, :d]
    return q * (np.vdot(q[:, 0], psi) / abs(np.vdot(q[:, 0], psi)))


class QuantumModel(SystemModel):
    """Density matrices on C^d."""

    kind = ModelKind.QUANTUM

    def __init__(self, d: int):
        if int(d) < 2:
            raise InvalidAxis(f"quantum model needs d >= 2, got {d}")
        d = int(d)
        self.d = d
        self.basis = hermitian_basis(d)
        super().__init__(d * d, self.coords(np.eye(d)), {"d": d})
        self.n_max = d

    # --- coordinate plumbing ---

    def matrix(self, x: np.ndarray) -> np.ndarray:
        """Hermitian matrix with coordinates ``x``."""
        return np.tensordot(np.asarray(x, dtype=float), self.basis, axes=1)

    def coords(self, m: np.ndarray) -> np.ndarray:
        """Coordinates tr(B_k M) of a Hermitian matrix."""
        return np.real(np.einsum("kij,ji->k", self.basis, m))

    def projector(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates of the projector onto the span of orthonormal columns."""
        v = vectors[:, None] if vectors.ndim == 1 else vectors
        return self.coords(v @ v.conj().T)

    def superoperator(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Matrix of a linear map on Herm(d) in these coordinates."""
        return np.column_stack([self.coords(fn(b)) for b in self.basis])

    def conjugation(self, u: np.ndarray) -> np.ndarray:
        return self.superoperator(lambda b: u @ b @ u.conj().T)

    def _eigh(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        values, vectors = np.linalg.eigh(self.matrix(x))
        return values[::-1], vectors[:, ::-1]

    def _support(self, x: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        values, vectors = self._eigh(x)
        return vectors[:, values > tol * max(1.0, values[0])]

    # --- cone and effects ---

    def cone_margin(self, x: np.ndarray) -> float:
        return float(np.linalg.eigvalsh(self.matrix(x))[0])

    def effect_range(self, e: np.ndarray) -> tuple[float, float]:
        values = np.linalg.eigvalsh(self.matrix(e))
        return float(values[0]), float(values[-1])

    def minimizing_pure_state(self, e: np.ndarray) -> np.ndarray:
        _, vectors = np.linalg.eigh(self.matrix(e))
        return self.projector(vectors[:, 0])

    # --- states ---

    def sample_pure(self, rng: np.random.Generator) -> np.ndarray:
        psi = rng.standard_normal(self.d) + 1j * rng.standard_normal(self.d)
        return self.projector(psi / np.linalg.norm(psi))

    def sample_state(self, rng: np.random.Generator) -> np.ndarray:
        g = rng.standard_normal((self.d, self.d)) + 1j * rng.standard_normal((self.d, self.d))
        rho = g @ g.conj().T
        return self.coords(rho / np.trace(rho).real)

    def is_pure(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        values, _ = self._eigh(x)
        return abs(values.sum() - 1.0) <= tol and values[0] >= 1.0 - tol

    def reference_pure_state(self) -> np.ndarray:
        return self.projector(np.eye(self.d)[:, 0])

    def special_states(self) -> list[np.ndarray]:
        return [self.unit / self.d]

    def decompose(self, x: np.ndarray) -> list[tuple[float, np.ndarray]]:
        # eigh returns an orthonormal basis inside degenerate eigenspaces, so the
        # projectors below are mutually orthogonal and deterministic for a given input
        values, vectors = self._eigh(x)
        return [
            (float(p), self.projector(vectors[:, i]))
            for i, p in enumerate(values)
            if p > 1e-14
        ]

    def distinguishing_candidate(self, states: np.ndarray) -> Optional[np.ndarray]:
        supports = [self._support(s) for s in states]
        for i in range(len(supports)):
            for j in range(i + 1, len(supports)):
                if np.max(np.abs(supports[i].conj().T @ supports[j]), initial=0.0) > 1e-9:
                    return None
        rows = np.vstack([self.projector(v) for v in supports])
        rows[-1] += self.unit - rows.sum(axis=0)
        return rows

    # --- atoms ---

    def is_atomic(self, e: np.ndarray, tol: float = 1e-9) -> bool:
        values = np.linalg.eigvalsh(self.matrix(e))
        return abs(values[-1] - 1.0) <= tol and np.all(np.abs(values[:-1]) <= tol)

    def tilde(self, omega: np.ndarray) -> np.ndarray:
        if not self.is_pure(omega):
            raise NotPure("quantum pure states are rank-one projectors")
        return np.array(omega, dtype=float)

    def hat(self, e: np.ndarray) -> np.ndarray:
        if not self.is_atomic(e):
            raise NotAtomic("quantum atoms are rank-one projectors")
        return np.array(e, dtype=float)

    # --- reversible maps ---

    def sample_reversible(self, rng: np.random.Generator) -> np.ndarray:
        return self.conjugation(haar_unitary(self.d, rng))

    def reversible_between(self, source: np.ndarray, target: np.ndarray) -> Optional[np.ndarray]:
        if not (self.is_pure(source) and self.is_pure(target)):
            return None
        psi = self._support(source)[:, 0]
        phi = self._support(target)[:, 0]
        u = _unitary_with_first_column(phi) @ _unitary_with_first_column(psi).conj().T
        return self.conjugation(u)

    # --- faces: subspaces of C^d, keyed by their projector ---

    def _face(self, vectors: np.ndarray) -> Face:
        q = vectors @ vectors.conj().T if vectors.size else np.zeros((self.d, self.d), dtype=complex)
        coords = self.coords(q)
        rank = vectors.shape[1] if vectors.size else 0
        return Face(tuple(np.round(coords, 8)), rank, f"rank-{rank} subspace", data=vectors)

    def _projector_matrix(self, face: Face) -> np.ndarray:
        v = face.data
        if v is None or not v.size:
            return np.zeros((self.d, self.d), dtype=complex)
        return v @ v.conj().T

    def _range(self, q: np.ndarray, tol: float = 1e-8) -> np.ndarray:
        values, vectors = np.linalg.eigh(q)
        return vectors[:, values > tol][:, ::-1]

    def face_of(self, x: np.ndarray) -> Face:
        return self._face(self._support(x))

    def top_face(self) -> Face:
        return self._face(np.eye(self.d, dtype=complex))

    def bottom_face(self) -> Face:
        return self._face(np.zeros((self.d, 0), dtype=complex))

    def face_equal(self, f: Face, g: Face) -> bool:
        return f.rank == g.rank and np.allclose(
            self._projector_matrix(f), self._projector_matrix(g), atol=1e-8
        )

    def face_complement(self, face: Face) -> Face:
        return self._face(self._range(np.eye(self.d) - self._projector_matrix(face)))

    def face_join(self, f: Face, g: Face) -> Face:
        return self._face(self._range(self._projector_matrix(f) + self._projector_matrix(g)))

    def face_meet(self, f: Face, g: Face) -> Face:
        return self.face_complement(
            self.face_join(self.face_complement(f), self.face_complement(g))
        )

    def face_leq(self, f: Face, g: Face) -> bool:
        residual = (np.eye(self.d) - self._projector_matrix(g)) @ self._projector_matrix(f)
        return float(np.max(np.abs(residual), initial=0.0)) <= 1e-8

    def face_effect_range(self, face: Face, e: np.ndarray) -> tuple[float, float]:
        v = face.data
        if v is None or not v.size:
            raise NotProjective("the zero face has no normalized states")
        values = np.linalg.eigvalsh(v.conj().T @ self.matrix(e) @ v)
        return float(values[0]), float(values[-1])

    def face_pure_states(self, face: Face, count: int, rng: np.random.Generator) -> np.ndarray:
        v = face.data
        if v is None or not v.size:
            return np.zeros((0, self.dim))
        out = []
        for _ in range(count):
            c = rng.standard_normal(v.shape[1]) + 1j * rng.standard_normal(v.shape[1])
            psi = v @ c
            out.append(self.projector(psi / np.linalg.norm(psi)))
        return np.vstack(out)

    def lattice_faces(self, cap: int, rng: np.random.Generator) -> list[Face]:
        """Projector net: 0, 1, computational rays, sampled rays and their complements."""
        if self.d > LATTICE_MAX_D:
            raise LatticeTooLarge(f"quantum lattices are enumerated for d <= {LATTICE_MAX_D}")
        faces = [self.bottom_face(), self.top_face()]
        rays = [np.eye(self.d, dtype=complex)[:, [j]] for j in range(self.d)]
        while 2 * len(rays) + 2 < cap and len(rays) < 4 * self.d * self.d:
            psi = rng.standard_normal(self.d) + 1j * rng.standard_normal(self.d)
            rays.append((psi / np.linalg.norm(psi))[:, None])
        for ray in rays:
            face = self._face(ray)
            for candidate in (face, self.face_complement(face)):
                if not any(self.face_equal(candidate, f) for f in faces):
                    faces.append(candidate)
        return faces[:cap]

    def filter_pair(self, face: Face) -> tuple[np.ndarray, np.ndarray]:
        q = self._projector_matrix(face)
        q_perp = np.eye(self.d) - q
        return (
            self.superoperator(lambda b: q @ b @ q),
            self.superoperator(lambda b: q_perp @ b @ q_perp),
        )

    def face_span(self, face: Face) -> np.ndarray:
        projection, _ = self.filter_pair(face)
        if face.rank == 0:
            return np.zeros((self.dim, 0))
        return linalg.orth(projection)

    # --- dual-space spectral structure ---

    def spectral_terms(self, a: np.ndarray, rel_tol: float = 1e-9) -> list[tuple[float, np.ndarray]]:
        values, vectors = self._eigh(a)
        scale = max(1.0, float(np.max(np.abs(values))))
        groups: list[list[int]] = []
        for i, value in enumerate(values):
            if groups and abs(values[groups[-1][0]] - value) <= rel_tol * scale:
                groups[-1].append(i)
            else:
                groups.append([i])
        return [
            (float(np.mean(values[g])), self.projector(vectors[:, g]))
            for g in groups
        ]

    def atomic_refinement(self, p: np.ndarray) -> list[np.ndarray]:
        values, vectors = self._eigh(p)
        if not np.all((np.abs(values) <= 1e-9) | (np.abs(values - 1.0) <= 1e-9)):
            raise NotProjective("effect is not a projector")
        return [self.projector(vectors[:, i]) for i in np.flatnonzero(np.abs(values - 1.0) <= 1e-9)]
