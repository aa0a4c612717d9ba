"""Minkowski R^{3,1} linear algebra, the upper hyperboloid and the light cone.

Conventions: metric ``diag(1, 1, 1, -1)``, components ordered
``(x1, x2, x3, x4)`` with ``x4`` the time-like one.  Everything is
dimensionless (unit mass, unit curvature radius).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

METRIC = np.array([1.0, 1.0, 1.0, -1.0])

#: generator metric of so(4,2), indices 1..6 stored at 0..5
GENERATOR_METRIC = np.array([1.0, 1.0, 1.0, -1.0, -1.0, 1.0])


class DomainError(ValueError):
    """Input outside the domain of a geometric operation."""


def lower(v):
    """Lower (or raise) a four-vector index; the metric is its own inverse."""
    return np.asarray(v, dtype=float) * METRIC


raise_index = lower


def mink_dot(u, v) -> float:
    """Minkowski product ``u1 v1 + u2 v2 + u3 v3 - u4 v4``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(u[0] * v[0] + u[1] * v[1] + u[2] * v[2] - u[3] * v[3])


@dataclass(frozen=True)
class HyperPoint:
    """Point of the upper sheet ``x.x = -1``; only the spatial part is stored."""

    x1: float
    x2: float
    x3: float

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    @property
    def x4(self) -> float:
        return math.sqrt(self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3 + 1.0)

    @property
    def ambient(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4])

    @property
    def radius(self) -> float:
        return math.sqrt(self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3)


def lift(spatial) -> HyperPoint:
    """Lift a spatial triple onto the upper sheet, ``x4 = sqrt(|x|^2 + 1)``."""
    s = np.asarray(spatial, dtype=float)
    if s.shape != (3,):
        raise DomainError(f"expected three spatial components, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise DomainError(f"non-finite spatial components {s}")
    return HyperPoint(float(s[0]), float(s[1]), float(s[2]))


@dataclass(frozen=True)
class ConeVector:
    """Null vector ``k = omega * (n, sigma)`` with ``|n| = 1``."""

    omega: float
    n: tuple[float, float, float]
    sigma: int = -1

    def __post_init__(self):
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise DomainError(f"cone scale omega must be positive, got {self.omega}")
        if self.sigma not in (1, -1):
            raise DomainError(f"sigma must be +1 or -1, got {self.sigma}")
        norm = math.sqrt(sum(c * c for c in self.n))
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"direction must be a unit vector, |n| = {norm}")

    @classmethod
    def from_direction(cls, n, omega: float = 1.0, sigma: int = -1) -> "ConeVector":
        """Normalise ``n`` and build the cone vector."""
        n = np.asarray(n, dtype=float)
        n = n / np.linalg.norm(n)
        return cls(float(omega), (float(n[0]), float(n[1]), float(n[2])), sigma)

    @property
    def direction(self) -> np.ndarray:
        return np.array(self.n)

    @property
    def components(self) -> np.ndarray:
        n = self.n
        w = self.omega
        return np.array([w * n[0], w * n[1], w * n[2], self.sigma * w])

    def scaled(self, t: float) -> "ConeVector":
        return ConeVector(self.omega * t, self.n, self.sigma)

    def flipped(self) -> "ConeVector":
        """Antipodal generator ``-k`` (opposite sigma, direction ``-n``)."""
        n = self.n
        return ConeVector(self.omega, (-n[0], -n[1], -n[2]), -self.sigma)


def pairing(x: HyperPoint, k: ConeVector) -> float:
    """``f = x.k = omega (x.n - sigma x4)``; its sign is always ``-sigma``."""
    n = k.n
    return k.omega * (x.x1 * n[0] + x.x2 * n[1] + x.x3 * n[2] - k.sigma * x.x4)


def measure_weight_H3(x: HyperPoint) -> float:
    """Density ``1/x4`` of the invariant measure with respect to ``d^3x``."""
    return 1.0 / x.x4


def measure_weight_cone(omega: float, n=None) -> float:
    """Density ``omega`` of ``Dk = omega domega dn``."""
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    return float(omega)


def sample_spatial(count: int, seed: int, radius_scale: float = 2.0) -> np.ndarray:
    """Centered Gaussian spatial components, shape ``(count, 3)``."""
    if count < 1:
        raise DomainError("count must be at least 1")
    rng = np.random.default_rng(seed)
    return radius_scale * rng.standard_normal((count, 3))


def sample_hyper_points(count: int, seed: int, radius_scale: float = 2.0) -> list[HyperPoint]:
    """Reproducible pseudo-random points on the upper sheet."""
    return [lift(s) for s in sample_spatial(count, seed, radius_scale)]


def sample_cone_vectors(count: int, seed: int, sigma: int | None = -1) -> list[ConeVector]:
    """Random cone vectors; ``sigma=None`` draws the sign at random too."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = rng.standard_normal(3)
        omega = float(np.exp(rng.uniform(-1.0, 1.0)))
        s = sigma if sigma is not None else int(rng.choice([-1, 1]))
        out.append(ConeVector.from_direction(n, omega, s))
    return out
