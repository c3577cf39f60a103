"""Ball state space: the Lorentz cone {(x0, v): x0 >= |v|}."""

from typing import Optional

import numpy as np
from scipy.linalg import block_diag

from ..core import ModelKind
from ..errors import InvalidAxis, NotPure
from .strictly_convex import StrictlyConvexModel


def random_orthogonal(k: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(r))


class BallModel(StrictlyConvexModel):
    """Unit ball in R^k with states (1, v)."""

    kind = ModelKind.BALL

    def __init__(self, k: int):
        if int(k) < 2:
            raise InvalidAxis(f"ball model needs k >= 2, got {k}")
        self.k = int(k)
        unit = np.zeros(self.k + 1)
        unit[0] = 1.0
        super().__init__(self.k + 1, unit, {"k": self.k})

    def _axis(self) -> np.ndarray:
        return np.eye(self.k)[0]

    def cone_margin(self, x: np.ndarray) -> float:
        return float(x[0] - np.linalg.norm(x[1:]))

    def effect_range(self, e: np.ndarray) -> tuple[float, float]:
        r = float(np.linalg.norm(e[1:]))
        return float(e[0] - r), float(e[0] + r)

    def minimizing_pure_state(self, e: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(e[1:])
        direction = -e[1:] / r if r > 0 else self._axis()
        return np.concatenate([[1.0], direction])

    def sample_pure(self, rng: np.random.Generator) -> np.ndarray:
        v = rng.standard_normal(self.k)
        return np.concatenate([[1.0], v / np.linalg.norm(v)])

    def is_pure(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return abs(x[0] - 1.0) <= tol and abs(np.linalg.norm(x[1:]) - 1.0) <= tol

    def reference_pure_state(self) -> np.ndarray:
        return np.concatenate([[1.0], self._axis()])

    def special_states(self) -> list[np.ndarray]:
        return [self.unit.copy()]

    def antipode(self, omega: np.ndarray) -> np.ndarray:
        return np.concatenate([[omega[0]], -omega[1:]])

    def decompose(self, x: np.ndarray) -> list[tuple[float, np.ndarray]]:
        r = float(np.linalg.norm(x[1:]))
        if r >= 1.0 - 1e-12:
            return [(1.0, np.concatenate([[1.0], x[1:] / r]))]
        # centre tie-break: the first canonical axis
        direction = x[1:] / r if r > 1e-12 else self._axis()
        plus = np.concatenate([[1.0], direction])
        return [((1 + r) / 2, plus), ((1 - r) / 2, self.antipode(plus))]

    def tilde(self, omega: np.ndarray) -> np.ndarray:
        if not self.is_pure(omega):
            raise NotPure("ball pure states have |v| = 1")
        return 0.5 * np.concatenate([[1.0], omega[1:]])

    def sample_reversible(self, rng: np.random.Generator) -> np.ndarray:
        return block_diag(1.0, random_orthogonal(self.k, rng))

    def reversible_between(self, source: np.ndarray, target: np.ndarray) -> Optional[np.ndarray]:
        if not (self.is_pure(source) and self.is_pure(target)):
            return None
        diff = source[1:] - target[1:]
        norm = np.linalg.norm(diff)
        if norm < 1e-12:
            return np.eye(self.dim)
        w = diff / norm
        return block_diag(1.0, np.eye(self.k) - 2.0 * np.outer(w, w))
