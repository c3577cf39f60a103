"""Planar strictly convex bodies described by a support function.

A body with support function h has boundary x(t) = h(t) n(t) + h'(t) n'(t),
n(t) = (cos t, sin t). States are (1, x, y); the antipode of x(t) is x(t + pi)
and the atomic effect equal to 1 on x(t) is (h(t + pi), cos t, sin t) divided
by the width h(t) + h(t + pi).
"""

import logging
from abc import abstractmethod
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..core import ModelKind
from ..errors import InvalidAxis, NotPure
from .strictly_convex import StrictlyConvexModel

logger = logging.getLogger(__name__)

MARGIN_GRID = 720
TWO_PI = 2 * np.pi


def _rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def _embed(block: np.ndarray) -> np.ndarray:
    out = np.eye(3)
    out[1:, 1:] = block
    return out


class SupportFunctionModel(StrictlyConvexModel):
    """Base class for smooth strictly convex planar state spaces."""

    def __init__(self, params: dict, chord_resolution: int = 10_000):
        self.chord_resolution = int(chord_resolution)
        super().__init__(3, np.array([1.0, 0.0, 0.0]), params)
        self._grid = np.linspace(0.0, TWO_PI, MARGIN_GRID, endpoint=False)

    @abstractmethod
    def support(self, t: np.ndarray) -> np.ndarray:
        """Support function h(t)."""

    @abstractmethod
    def support_derivative(self, t: np.ndarray) -> np.ndarray:
        """Derivative h'(t)."""

    def boundary_xy(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        h, dh = self.support(t), self.support_derivative(t)
        c, s = np.cos(t), np.sin(t)
        return np.stack([h * c - dh * s, h * s + dh * c], axis=-1)

    def boundary(self, t: float) -> np.ndarray:
        """Pure state with outward normal angle ``t``."""
        return np.concatenate([[1.0], self.boundary_xy(t)])

    def width(self, t: float) -> float:
        return float(self.support(t) + self.support(t + np.pi))

    def _gap(self, x: np.ndarray) -> tuple[float, float]:
        """Minimum over t of x0 h(t) - n(t).(x1, x2), and the minimizing angle."""

        def gap(t):
            return x[0] * self.support(t) - x[1] * np.cos(t) - x[2] * np.sin(t)

        values = gap(self._grid)
        i = int(np.argmin(values))
        step = TWO_PI / MARGIN_GRID
        res = minimize_scalar(
            gap,
            bounds=(self._grid[i] - step, self._grid[i] + step),
            method="bounded",
            options={"xatol": 1e-13},
        )
        if res.fun < values[i]:
            return float(res.fun), float(res.x % TWO_PI)
        return float(values[i]), float(self._grid[i])

    def normal_angle(self, omega: np.ndarray) -> float:
        """Outward normal angle of a pure state."""
        return self._gap(omega)[1]

    # --- cone and effects ---

    def cone_margin(self, x: np.ndarray) -> float:
        if x[0] < 0:
            return float(x[0])
        return self._gap(x)[0]

    def effect_range(self, e: np.ndarray) -> tuple[float, float]:
        r = float(np.hypot(e[1], e[2]))
        if r == 0.0:
            return float(e[0]), float(e[0])
        alpha = float(np.arctan2(e[2], e[1]))
        return (
            float(e[0] - r * self.support(alpha + np.pi)),
            float(e[0] + r * self.support(alpha)),
        )

    def minimizing_pure_state(self, e: np.ndarray) -> np.ndarray:
        if np.hypot(e[1], e[2]) == 0.0:
            return self.boundary(0.0)
        return self.boundary(float(np.arctan2(e[2], e[1])) + np.pi)

    # --- states ---

    def sample_pure(self, rng: np.random.Generator) -> np.ndarray:
        return self.boundary(rng.uniform(0.0, TWO_PI))

    def pure_net(self, size: int = 256) -> np.ndarray:
        return np.vstack([self.boundary(t) for t in np.linspace(0.0, TWO_PI, size, endpoint=False)])

    def is_pure(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return abs(x[0] - 1.0) <= tol and abs(self._gap(x)[0]) <= max(tol, 1e-9)

    def reference_pure_state(self) -> np.ndarray:
        return self.boundary(0.0)

    def antipode(self, omega: np.ndarray) -> np.ndarray:
        return self.boundary(self.normal_angle(omega) + np.pi)

    def tilde(self, omega: np.ndarray) -> np.ndarray:
        if not self.is_pure(omega):
            raise NotPure("pure states lie on the boundary curve")
        t = self.normal_angle(omega)
        return np.array([self.support(t + np.pi), np.cos(t), np.sin(t)]) / self.width(t)

    # --- chords ---

    def chord_angles(self, x: np.ndarray) -> list[float]:
        """Normal angles t in [0, pi) whose antipodal chord passes through ``x``."""
        p = x[1:] / x[0]

        def g(t):
            a, b = self.boundary_xy(t), self.boundary_xy(np.asarray(t) + np.pi)
            d, r = b - a, p - a
            return d[..., 0] * r[..., 1] - d[..., 1] * r[..., 0]

        grid = np.linspace(0.0, np.pi, self.chord_resolution + 1)
        values = g(grid)
        scale = float(np.max(np.abs(values)))
        if scale < 1e-12:
            # every antipodal chord passes through x; pick the canonical one
            return [0.0]
        roots: list[float] = []
        for i in range(self.chord_resolution):
            lo, hi = values[i], values[i + 1]
            if abs(lo) <= 1e-15 * scale:
                roots.append(float(grid[i]))
            elif lo * hi < 0:
                roots.append(float(brentq(g, grid[i], grid[i + 1], xtol=1e-15)))
        unique: list[float] = []
        for t in roots:
            if t >= np.pi - 1e-9:
                t = 0.0
            if all(abs(t - u) > 1e-9 for u in unique):
                unique.append(t)
        return unique

    def _chord_parts(self, x: np.ndarray, t: float) -> list[tuple[float, np.ndarray]]:
        a, b = self.boundary(t), self.boundary(t + np.pi)
        d = a[1:] - b[1:]
        weight = float(np.clip((x[1:] / x[0] - b[1:]) @ d / (d @ d), 0.0, 1.0))
        parts = [(weight, a), (1.0 - weight, b)]
        parts = [(p, s) for p, s in parts if p > 1e-14]
        return sorted(parts, key=lambda part: -part[0])

    def decompositions(self, x: np.ndarray) -> list[list[tuple[float, np.ndarray]]]:
        if self.is_pure(x):
            return [[(1.0, np.array(x, dtype=float))]]
        chords = [self._chord_parts(x, t) for t in self.chord_angles(x)]
        logger.debug("[catalog] %d antipodal chords through %s", len(chords), np.round(x, 6))
        return chords

    def decompose(self, x: np.ndarray) -> list[tuple[float, np.ndarray]]:
        return self.decompositions(x)[0]


class EllipseModel(SupportFunctionModel):
    """Filled ellipse x^2/a^2 + y^2/b^2 <= 1."""

    kind = ModelKind.ELLIPSE

    def __init__(self, a: float = 2.0, b: float = 1.0, chord_resolution: int = 10_000):
        if not (a > 0 and b > 0):
            raise InvalidAxis(f"ellipse axes must be positive, got a={a}, b={b}")
        self.a, self.b = float(a), float(b)
        self._shape = np.diag([self.a, self.b])
        super().__init__({"a": self.a, "b": self.b}, chord_resolution)

    def support(self, t):
        return np.sqrt((self.a * np.cos(t)) ** 2 + (self.b * np.sin(t)) ** 2)

    def support_derivative(self, t):
        return (self.b**2 - self.a**2) * np.sin(t) * np.cos(t) / self.support(t)

    def special_states(self) -> list[np.ndarray]:
        return [self.unit.copy(), np.array([1.0, 0.3 * self.a, 0.4 * self.b])]

    def _conjugate(self, block: np.ndarray) -> np.ndarray:
        return _embed(self._shape @ block @ np.linalg.inv(self._shape))

    def sample_reversible(self, rng: np.random.Generator) -> np.ndarray:
        block = _rotation(rng.uniform(0.0, TWO_PI))
        if rng.random() < 0.5:
            block = block @ np.diag([1.0, -1.0])
        return self._conjugate(block)

    def reversible_between(self, source: np.ndarray, target: np.ndarray) -> Optional[np.ndarray]:
        if not (self.is_pure(source) and self.is_pure(target)):
            return None
        inv = np.linalg.inv(self._shape)
        p, q = inv @ source[1:], inv @ target[1:]
        angle = np.arctan2(q[1], q[0]) - np.arctan2(p[1], p[0])
        return self._conjugate(_rotation(angle))


class PuffedTriangleModel(SupportFunctionModel):
    """Isosceles triangle puffed out to a smooth strictly convex body.

    Support function h(t) = 1 + e3 cos 3t + e2 cos 2t; positive curvature
    radius h + h'' needs 8|e3| + 3|e2| < 1.
    """

    kind = ModelKind.PUFFED_TRIANGLE

    def __init__(self, e3: float = 0.1, e2: float = 0.05, chord_resolution: int = 10_000):
        if not 8 * abs(e3) + 3 * abs(e2) < 1:
            raise InvalidAxis(f"support function is not strictly convex for e3={e3}, e2={e2}")
        self.e3, self.e2 = float(e3), float(e2)
        super().__init__({"e3": self.e3, "e2": self.e2}, chord_resolution)
        self._group = self._find_symmetries()

    def support(self, t):
        return 1.0 + self.e3 * np.cos(3 * t) + self.e2 * np.cos(2 * t)

    def support_derivative(self, t):
        return -3 * self.e3 * np.sin(3 * t) - 2 * self.e2 * np.sin(2 * t)

    def special_states(self) -> list[np.ndarray]:
        return [self.unit.copy(), np.array([1.0, 0.15, 0.25])]

    def _find_symmetries(self) -> list[np.ndarray]:
        t = self._grid
        h = self.support(t)
        group = []
        for j in range(12):
            angle = np.pi * j / 6
            if np.allclose(self.support(t - angle), h, atol=1e-12):
                group.append(_embed(_rotation(angle)))
            if np.allclose(self.support(angle - t), h, atol=1e-12):
                c, s = np.cos(angle), np.sin(angle)
                group.append(_embed(np.array([[c, s], [s, -c]])))
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
