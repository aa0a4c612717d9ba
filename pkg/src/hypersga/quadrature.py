"""Quadrature rules: Gauss-Legendre, sphere product rules, tanh-sinh."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class QuadratureError(RuntimeError):
    """A quadrature failed to converge; ``diagnostics`` holds the history."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def gauss_legendre(order: int, a: float = -1.0, b: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


@dataclass(frozen=True)
class SphereRule:
    """Gauss-Legendre (in cos theta) x trapezoid (in azimuth) product rule.

    ``degree`` is the polynomial exactness: all spherical harmonics up to
    that degree are integrated exactly.
    """

    degree: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def rule_id(self) -> str:
        return f"gl-trap-{self.degree}"

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def product(cls, degree: int) -> "SphereRule":
        n_theta = degree // 2 + 1
        n_phi = degree + 1
        c, wc = np.polynomial.legendre.leggauss(n_theta)
        phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
        s = np.sqrt(1.0 - c * c)
        nodes = np.stack(
            [
                np.outer(s, np.cos(phi)).ravel(),
                np.outer(s, np.sin(phi)).ravel(),
                np.repeat(c, n_phi),
            ],
            axis=1,
        )
        weights = np.repeat(wc, n_phi) * (2.0 * np.pi / n_phi)
        return cls(degree, nodes, weights)

    @classmethod
    def from_id(cls, rule_id: str) -> "SphereRule":
        prefix = "gl-trap-"
        if not rule_id.startswith(prefix):
            raise ValueError(f"unknown spherical rule id {rule_id!r}")
        return cls.product(int(rule_id[len(prefix):]))


def orthonormal_frame(n) -> tuple[np.ndarray, np.ndarray]:
    """Two unit vectors completing ``n`` to a right-handed orthonormal frame."""
    n = np.asarray(n, float)
    helper = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(n, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2


# -- tanh-sinh ---------------------------------------------------------------------

def _tanh_sinh_nodes(h: float, tmax: float = 3.5):
    k = np.arange(-int(tmax / h), int(tmax / h) + 1)
    t = k * h
    u = 0.5 * np.pi * np.sinh(t)
    x = np.tanh(u)
    w = h * 0.5 * np.pi * np.cosh(t) / np.cosh(u) ** 2
    keep = np.abs(x) < 1.0
    return x[keep], w[keep]


def tanh_sinh(f, a: float, b: float, tol: float = 1e-14, max_level: int = 12) -> complex:
    """Double-exponential quadrature of ``f`` over ``[a, b]`` (vectorised ``f``).

    The step is halved until two successive estimates agree to ``tol``
    (absolute).
    """
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    h = 0.5
    prev = None
    history = []
    for _level in range(max_level):
        x, w = _tanh_sinh_nodes(h)
        est = half * np.sum(w * f(mid + half * x))
        history.append(est)
        if prev is not None and abs(est - prev) < tol:
            return est
        prev = est
        h *= 0.5
    raise QuadratureError(
        f"tanh-sinh did not converge on [{a}, {b}]",
        {"estimates": history, "tol": tol},
    )


def tanh_sinh_panels(f, a: float, b: float, panel: float = 1.0, tol: float = 1e-14) -> complex:
    """Split ``[a, b]`` into panels of length about ``panel`` and sum tanh-sinh."""
    n = max(1, math.ceil((b - a) / panel))
    edges = np.linspace(a, b, n + 1)
    return sum(tanh_sinh(f, lo, hi, tol / n) for lo, hi in zip(edges[:-1], edges[1:]))
