"""Differential-operator realization of the quantum algebra on H^3.

Wave functions live on the spatial chart ``(x1, x2, x3)`` with
``x4 = sqrt(x^2 + 1)``.  Each :class:`WaveFunction` can return a jet of
order 0, 1 or 2 at a point; operators are thin wrappers that build new wave
functions by exact composition (multiplication by coefficient fields,
partial derivatives, sums), so every residual is free of truncation error.

Operators that are functions of ``h`` (``K.k``, ``L.k``, ``A+-.k``) are
realized at the label level: on a plane wave of label ``rho`` the functions
``sqrt(h)`` and ``g(h)`` act as the scalars ``sqrt(rho)`` and ``g(rho)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import jets
from .geometry import ConeVector, HyperPoint, lift, sample_cone_vectors, sample_spatial
from .quadrature import SphereRule, gauss_legendre
from .reports import RelationRow, VerificationReport
from .special import g_of_h, ladder_coefficient, sqrt_rho_shift

MAX_ORDER = 2

#: The divergence-form Hamiltonian is printed with an overall 1/2.  With it
#: the plane waves have eigenvalue (1 + rho^2)/2, which contradicts
#: H = 1 + h^2 and lambda = 1 + rho^2.  The realization drops the 1/2;
#: ``hamiltonian(factor=0.5)`` gives the printed normalization.
HAMILTONIAN_FACTOR = 1.0


class OrderError(ValueError):
    """A derivative of order above two was requested."""


class LabelRequiredError(ValueError):
    """A spectrally realized operator was applied to an unlabeled function."""


class MismatchError(RuntimeError):
    """A ladder action did not produce a multiple of the expected plane wave."""

    def __init__(self, message: str, deviation: float):
        super().__init__(message)
        self.deviation = deviation


# -- wave functions -----------------------------------------------------------------

def _x4(xs):
    return jets.sqrt(xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2] + 1.0)


def _point_vars(point, order: int):
    point = np.asarray(point, dtype=float)
    if order == 0:
        return [float(c) for c in point]
    return jets.seed(point, order)


def _as_spatial(x) -> np.ndarray:
    if isinstance(x, HyperPoint):
        return x.spatial
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class PlaneWaveLabel:
    """Label ``(k, rho)`` of the plane wave ``q^{-1 + i rho}``, ``rho`` possibly complex."""

    k: ConeVector
    rho: complex

    def shifted(self, delta) -> "PlaneWaveLabel":
        """Label with ``rho -> rho - delta``."""
        return PlaneWaveLabel(self.k, _tidy(self.rho - delta))


def _tidy(z):
    z = complex(z)
    return z.real if z.imag == 0 else z


class WaveFunction:
    """Function on the chart with exact derivatives up to order two."""

    label: PlaneWaveLabel | None = None

    def __init__(self):
        self._cache_key = None
        self._cache_val = None

    def _jet(self, point: np.ndarray, order: int):
        raise NotImplementedError

    def jet(self, x, order: int = 0):
        """Value (``order=0``) or a jet of the given order at ``x``."""
        if order > MAX_ORDER or order < 0:
            raise OrderError(f"order {order} not available (max {MAX_ORDER})")
        p = _as_spatial(x)
        key = (p.tobytes(), order)
        if key == self._cache_key:
            return self._cache_val
        out = self._jet(p, order)
        if order > 0 and not isinstance(out, jets.Jet):
            out = jets.lift_constant(out, 3, order)
        self._cache_key, self._cache_val = key, out
        return out

    def __call__(self, x) -> complex:
        return complex(self.jet(x, 0))

    def values(self, points) -> np.ndarray:
        return np.array([self(p) for p in points], dtype=complex)

    # linear structure
    def __add__(self, other):
        return Combination(((1.0, self), (1.0, other)))

    def __sub__(self, other):
        return Combination(((1.0, self), (-1.0, other)))

    def __rmul__(self, c):
        return Combination(((c, self),))


class AnalyticWave(WaveFunction):
    """Wave function given by a jet-transparent expression ``fn([x1, x2, x3])``."""

    def __init__(self, fn: Callable, label: PlaneWaveLabel | None = None, name: str = ""):
        super().__init__()
        self.fn = fn
        self.label = label
        self.name = name

    def _jet(self, point, order):
        return self.fn(_point_vars(point, order))


class Derivative(WaveFunction):
    def __init__(self, psi: WaveFunction, alpha: int):
        super().__init__()
        self.psi = psi
        self.alpha = alpha

    def _jet(self, point, order):
        if order + 1 > MAX_ORDER:
            raise OrderError("derivative needs one order more than is available")
        j = self.psi.jet(point, order + 1)
        if order == 0:
            return j.grad[self.alpha]
        return jets.Jet(j.grad[self.alpha], j.hess[self.alpha])


class FieldProduct(WaveFunction):
    """Pointwise product with a coefficient field ``c([x1, x2, x3])``."""

    def __init__(self, psi: WaveFunction, coeff: Callable):
        super().__init__()
        self.psi = psi
        self.coeff = coeff

    def _jet(self, point, order):
        return self.coeff(_point_vars(point, order)) * self.psi.jet(point, order)


class Combination(WaveFunction):
    def __init__(self, terms: Sequence[tuple[complex, WaveFunction]]):
        super().__init__()
        self.terms = tuple(terms)

    def _jet(self, point, order):
        out = 0.0
        for c, psi in self.terms:
            out = c * psi.jet(point, order) + out
        return out


def plane_wave(label: PlaneWaveLabel) -> AnalyticWave:
    """``x -> q^{-1 + i rho}`` with ``q = |x.k| > 0``.

    Only the past-cone section is used internally (``sigma = -1``, so that
    ``q = omega (x.n + x4)``); a future-cone label is replaced by ``-k``,
    which has the same ``|x.k|``.
    """
    k = label.k if label.k.sigma == -1 else label.k.flipped()
    n = k.n
    w = k.omega
    expo = -1.0 + 1j * complex(label.rho)

    def fn(xs):
        q = w * (xs[0] * n[0] + xs[1] * n[1] + xs[2] * n[2] + _x4(xs))
        return q**expo

    return AnalyticWave(fn, label=PlaneWaveLabel(label.k, label.rho), name="plane_wave")


def gaussian_wave(center=(0.0, 0.0, 0.0), width: float = 1.0, wavevector=(0.0, 0.0, 0.0)) -> AnalyticWave:
    """``exp(-|x - c|^2 / (2 s^2) + i b.x)``, a Gaussian-damped test function."""
    c = tuple(float(v) for v in center)
    b = tuple(float(v) for v in wavevector)
    s2 = float(width) ** 2

    def fn(xs):
        d = [xs[a] - c[a] for a in range(3)]
        r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
        ph = xs[0] * b[0] + xs[1] * b[1] + xs[2] * b[2]
        return jets.exp(-r2 / (2.0 * s2) + 1j * ph)

    return AnalyticWave(fn, name="gaussian")


# -- operator handles -------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorHandle:
    """Named linear operator; ``build(psi)`` returns the image wave function."""

    name: str
    build: Callable[[WaveFunction], WaveFunction] = field(repr=False, compare=False)
    params: tuple = ()
    order: int = 1


def apply(handle: OperatorHandle, psi: WaveFunction) -> WaveFunction:
    return handle.build(psi)


def identity() -> OperatorHandle:
    return OperatorHandle("1", lambda psi: psi, order=0)


def position(i: int) -> OperatorHandle:
    """Multiplication by ``X_i`` (``i = 1..4``; ``X_4 = sqrt(X^2 + 1)``)."""
    if i == 4:
        return OperatorHandle("X4", lambda psi: FieldProduct(psi, _x4), (4,), 0)
    a = i - 1
    return OperatorHandle(f"X{i}", lambda psi: FieldProduct(psi, lambda xs: xs[a]), (i,), 0)


def _conformal(power: float):
    def c(xs):
        return (xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2] + 1.0) ** power
    return c


def momentum(alpha: int) -> OperatorHandle:
    """``P_a = (X^2 + 1)^{1/4} (-i d_a) (X^2 + 1)^{-1/4}``."""
    a = alpha - 1

    def build(psi):
        inner = FieldProduct(psi, _conformal(-0.25))
        return FieldProduct(Combination(((-1j, Derivative(inner, a)),)), _conformal(0.25))

    return OperatorHandle(f"P{alpha}", build, (alpha,), 1)


def hamiltonian(factor: float = HAMILTONIAN_FACTOR) -> OperatorHandle:
    """``-factor sqrt(X^2+1) d_a [(delta_ab + X_a X_b) / sqrt(X^2+1)] d_b``."""

    def build(psi):
        outer = []
        for a in range(3):
            inner = []
            for b in range(3):
                def coeff(xs, a=a, b=b):
                    return ((1.0 if a == b else 0.0) + xs[a] * xs[b]) / _x4(xs)
                inner.append((1.0, FieldProduct(Derivative(psi, b), coeff)))
            outer.append((1.0, Derivative(Combination(inner), a)))
        return FieldProduct(Combination(outer), lambda xs: -factor * _x4(xs))

    return OperatorHandle("H", build, (factor,), 2)


def hamiltonian_expanded(factor: float = HAMILTONIAN_FACTOR) -> OperatorHandle:
    """Same operator with the divergence worked out: ``-(d + XX) dd - 3 X.d``."""

    def build(psi):
        terms = []
        for a in range(3):
            for b in range(3):
                def coeff(xs, a=a, b=b):
                    return -factor * ((1.0 if a == b else 0.0) + xs[a] * xs[b])
                terms.append((1.0, FieldProduct(Derivative(Derivative(psi, b), a), coeff)))
            terms.append((1.0, FieldProduct(Derivative(psi, a), lambda xs, a=a: -3.0 * factor * xs[a])))
        return Combination(terms)

    return OperatorHandle("H_expanded", build, (factor,), 2)


def angular(i: int, j: int, ordering: str = "symmetric") -> OperatorHandle:
    """``J_ab = X_a P_b - X_b P_a`` and the boost ``J_4a`` (``J_a4 = -J_4a``).

    The boost is printed as ``sqrt(X^2+1) P_a``, which is not Hermitian for
    the measure ``d^3x / x4``.  ``ordering="symmetric"`` (default) uses
    ``(X4 P_a + P_a X4) / 2`` instead; with it ``-1/2 J_ij J^ij`` equals
    the Hamiltonian exactly.  ``ordering="printed"`` keeps the printed form.
    """
    if i == j:
        return OperatorHandle(f"J{i}{j}", lambda psi: Combination(()), (i, j), 0)
    if i == 4 or j == 4:
        a = j if i == 4 else i
        sign = 1.0 if i == 4 else -1.0
        p = momentum(a)
        if ordering == "printed":
            def build(psi):
                return Combination(((sign, FieldProduct(p.build(psi), _x4)),))
        elif ordering == "symmetric":
            def build(psi):
                return Combination((
                    (0.5 * sign, FieldProduct(p.build(psi), _x4)),
                    (0.5 * sign, p.build(FieldProduct(psi, _x4))),
                ))
        else:
            raise ValueError(f"unknown ordering {ordering!r}")
        return OperatorHandle(f"J{i}{j}", build, (i, j, ordering))
    xi, xj = position(i), position(j)
    pi, pj = momentum(i), momentum(j)
    return OperatorHandle(
        f"J{i}{j}",
        lambda psi: Combination(((1.0, xi.build(pj.build(psi))), (-1.0, xj.build(pi.build(psi))))),
        (i, j),
    )


def casimir_hamiltonian(ordering: str = "symmetric") -> OperatorHandle:
    """``-1/2 J_ij J^ij`` (metric ``diag(1,1,1,-1)`` on both indices)."""
    g = (1.0, 1.0, 1.0, -1.0)

    def build(psi):
        terms = []
        for i in range(1, 5):
            for j in range(1, 5):
                if i == j:
                    continue
                J = angular(i, j, ordering)
                terms.append((-0.5 * g[i - 1] * g[j - 1], J.build(J.build(psi))))
        return Combination(terms)

    return OperatorHandle("-1/2 JJ", build, (), 2)


def _past(k: ConeVector) -> ConeVector:
    return k if k.sigma == -1 else k.flipped()


def t_dot_k(k: ConeVector) -> OperatorHandle:
    """``T.k = i (X.k (2 X_b d_b + 3) + 2 k_a d_a)`` with ``X.k = omega (x.n + x4)``."""
    kk = _past(k)
    n = kk.n
    w = kk.omega

    def build(psi):
        def f(xs):
            return w * (xs[0] * n[0] + xs[1] * n[1] + xs[2] * n[2] + _x4(xs))

        euler = Combination(
            [(1.0, FieldProduct(Derivative(psi, b), lambda xs, b=b: 2.0 * xs[b])) for b in range(3)]
            + [(3.0, psi)]
        )
        terms = [(1j, FieldProduct(euler, f))]
        terms += [(2j * w * n[a], Derivative(psi, a)) for a in range(3)]
        return Combination(terms)

    return OperatorHandle("T.k", build, (k,), 1)


# label-level operators ------------------------------------------------------------------

def _spectral(name: str, coeff: Callable[[complex], complex], shift) -> OperatorHandle:
    def build(psi):
        if psi.label is None:
            raise LabelRequiredError(f"{name} acts only on labeled plane waves")
        c = coeff(psi.label.rho)
        new = plane_wave(psi.label.shifted(shift))
        return _Scaled(new, c)

    return OperatorHandle(name, build, (), 0)


class _Scaled(AnalyticWave):
    def __init__(self, psi: AnalyticWave, c: complex):
        super().__init__(lambda xs: c * psi.fn(xs), label=psi.label, name=psi.name)
        self.coefficient = c


def h_operator() -> OperatorHandle:
    return _spectral("h", lambda rho: complex(rho), 0.0)


def k_coefficient(rho) -> complex:
    """``sqrt(h) X.k sqrt(h)`` on ``psi(rho)``: ``sqrt(rho - i) sqrt(rho)``."""
    return cmath.sqrt(complex(rho) - 1j) * cmath.sqrt(complex(rho))


def l_coefficient(rho, t_coeff: complex | None = None) -> complex:
    """``g(h)^-1 sqrt(h) T.k sqrt(h) g(h)^-1`` on ``psi(rho)``."""
    rho = complex(rho)
    if t_coeff is None:
        t_coeff = -(2.0 * rho - 1j)
    return cmath.sqrt(rho - 1j) * t_coeff * cmath.sqrt(rho) / (g_of_h(rho - 1j) * g_of_h(rho))


# -- ladder actions ----------------------------------------------------------------------

@dataclass(frozen=True)
class LadderResult:
    coefficient: complex
    shifted_label: PlaneWaveLabel
    residual: float = 0.0


def _sample_points(count: int, seed: int, scale: float = 1.5):
    return list(sample_spatial(count, seed, scale))


def fit_coefficient(image: WaveFunction, target: WaveFunction, points) -> tuple[complex, float]:
    """Least-squares ``c`` with ``image ~ c * target`` and max relative deviation."""
    a = image.values(points)
    b = target.values(points)
    c = complex(np.vdot(b, a) / np.vdot(b, b))
    dev = float(np.max(np.abs(a - c * b) / np.abs(b)) / max(abs(c), 1e-300))
    return c, dev


def ladder_action_T(label: PlaneWaveLabel, points=None, tol: float = 1e-8) -> LadderResult:
    """Apply ``T.k`` to ``psi(rho)`` and fit against ``psi(rho - i)``."""
    if points is None:
        points = _sample_points(50, 2024)
    psi = plane_wave(label)
    shifted = label.shifted(1j)
    c, dev = fit_coefficient(apply(t_dot_k(label.k), psi), plane_wave(shifted), points)
    if dev > tol:
        raise MismatchError(f"T.k image is not a multiple of psi(rho - i): {dev:.3e}", dev)
    return LadderResult(c, shifted, dev)


def ladder_action_KLA(label: PlaneWaveLabel, which: str, points=None) -> LadderResult:
    """Label-level action of ``K.k``, ``L.k``, ``A+.k = K - L`` or ``A-.k = K + L``.

    The ``T.k`` coefficient inside ``L`` is the one measured by exact
    differentiation, not the printed value.
    """
    rho = complex(label.rho)
    if abs(rho) < 1e-6:
        from .special import NearPoleError
        raise NearPoleError("rho = 0 is a branch point of sqrt(h)")
    shifted = label.shifted(1j)
    if which == "K":
        return LadderResult(k_coefficient(rho), shifted)
    t = ladder_action_T(label, points)
    lc = l_coefficient(rho, t.coefficient)
    kc = k_coefficient(rho)
    coeffs = {"L": lc, "A+": kc - lc, "A-": kc + lc}
    if which not in coeffs:
        raise ValueError(f"unknown ladder operator {which!r}")
    return LadderResult(coeffs[which], shifted, t.residual)


def power_ladder(label: PlaneWaveLabel, u) -> LadderResult:
    """``(A+.k)^{-iu}`` on ``psi(rho)``: coefficient ``g(u, rho)``, label ``rho - u``."""
    if isinstance(u, complex) and u.imag == 0:
        u = u.real
    return LadderResult(ladder_coefficient(u, float(np.real(label.rho))), label.shifted(u))


# -- radial ODE -------------------------------------------------------------------------------

def radial_solution(rho: float, m2: float, c1: complex = 1.0, c2: complex = 0.0) -> Callable:
    """Closed-form solution of the radial equation as a jet-transparent ``psi(f)``."""
    a = 1j * rho
    if m2 == 0:
        return lambda f: c1 * f ** (-1.0 + a) + c2 * f ** (-1.0 - a)

    def psi(f):
        s = jets.sqrt(f * f - m2 + 0j)
        w = f + s
        return (c1 * w**a + c2 * w ** (-a)) / s

    return psi


def verify_radial_ode(rho: float, m2: float, points_f, c1: complex = 1.0, c2: complex = 0.0) -> float:
    """Max of ``|(f^2 - m^2) psi'' + 3 f psi' + (1 + rho^2) psi|`` over ``points_f``."""
    lam = 1.0 + rho * rho
    psi = radial_solution(rho, m2, c1, c2)
    worst = 0.0
    for f in points_f:
        f = float(f)
        if abs(f * f - m2) < 1e-12 or (m2 == 0 and f <= 0):
            from .geometry import DomainError
            raise DomainError(f"f = {f} is a singular point for m^2 = {m2}")
        j = psi(jets.seed(np.array([f]), 2)[0])
        r = (f * f - m2) * j.hess[0, 0] + 3.0 * f * j.grad[0] + lam * j.val
        worst = max(worst, abs(r))
    return worst


# -- inner products and residuals -----------------------------------------------------------

@dataclass(frozen=True)
class ChartQuadrature:
    """Sphere x Gauss-Legendre product rule on the ball ``|x| <= radius``."""

    sphere_degree: int = 14
    radial_order: int = 24
    radius: float = 6.0

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        rule = SphereRule.product(self.sphere_degree)
        r, wr = gauss_legendre(self.radial_order, 0.0, self.radius)
        pts = (r[:, None, None] * rule.nodes[None, :, :]).reshape(-1, 3)
        w = (wr[:, None] * r[:, None] ** 2 * rule.weights[None, :]).ravel()
        return pts, w


def inner_product(phi: WaveFunction, psi: WaveFunction, quad: ChartQuadrature = ChartQuadrature()) -> complex:
    """``<phi|psi> = int d^3x / sqrt(x^2 + 1) phi* psi``."""
    pts, w = quad.nodes()
    x4 = np.sqrt(1.0 + np.einsum("ij,ij->i", pts, pts))
    return complex(np.sum(w / x4 * np.conj(phi.values(pts)) * psi.values(pts)))


def hermiticity_residual(handle: OperatorHandle, phi: WaveFunction, psi: WaveFunction,
                         quad: ChartQuadrature = ChartQuadrature()) -> float:
    """``|<phi, A psi> - <A phi, psi>|``."""
    return abs(inner_product(phi, apply(handle, psi), quad) - inner_product(apply(handle, phi), psi, quad))


def commutator_residual(h1: OperatorHandle, h2: OperatorHandle,
                        expected: Sequence[tuple[complex, OperatorHandle]],
                        psi: WaveFunction, points) -> float:
    """``max |([h1, h2] - sum c_k E_k) psi| / (1 + |psi|)`` over ``points``."""
    comm = Combination(
        [(1.0, apply(h1, apply(h2, psi))), (-1.0, apply(h2, apply(h1, psi)))]
        + [(-c, apply(e, psi)) for c, e in expected]
    )
    return max(abs(comm(p)) / (1.0 + abs(psi(p))) for p in points)


def j_commutator_expected(i: int, k: int, l: int, m: int) -> list[tuple[complex, OperatorHandle]]:
    """``[J_ik, J_lm] = -i (g_im J_kl + g_kl J_im - g_il J_km - g_km J_il)``."""
    g = {1: 1.0, 2: 1.0, 3: 1.0, 4: -1.0}

    def gg(a, b):
        return g[a] if a == b else 0.0

    out = []
    for coef, (a, b) in (
        (gg(i, m), (k, l)), (gg(k, l), (i, m)), (-gg(i, l), (k, m)), (-gg(k, m), (i, l))
    ):
        if coef != 0.0 and a != b:
            out.append((-1j * coef, angular(a, b)))
    return out


# -- suite ------------------------------------------------------------------------------------

DEFAULT_RHO_GRID = (-3.0, -1.0, -0.5, 0.5, 1.0, 3.0)

DEFAULT_TOLERANCES = {
    "eigenvalue": 1e-8,
    "casimir_form": 1e-8,
    "radial_ode": 1e-9,
    "ladder_T": 1e-8,
    "ladder_Aminus": 1e-8,
    "ladder_Aplus": 1e-8,
    "ladder_KL": 1e-12,
    "hermiticity_P": 1e-6,
    "hermiticity_H": 1e-5,
    "commutator_J": 1e-8,
    "commutator_XP": 1e-10,
    "power_ladder": 1e-10,
    "power_ladder_boundary": 1e-10,
}


def random_labels(count: int, seed: int, rho_range=(-5.0, 5.0)) -> list[PlaneWaveLabel]:
    rng = np.random.default_rng([seed, 2])
    ks = sample_cone_vectors(count, seed)
    return [PlaneWaveLabel(k, float(rng.uniform(*rho_range))) for k in ks]


def eigenvalue_residuals(count: int = 50, seed: int = 0, handle: OperatorHandle | None = None) -> np.ndarray:
    """``|H psi - (1 + rho^2) psi| / |psi|`` at random (label, point) pairs."""
    H = handle or hamiltonian()
    labels = random_labels(count, seed)
    pts = sample_spatial(count, seed, 1.5)
    out = []
    for lab, p in zip(labels, pts):
        psi = plane_wave(lab)
        v = psi(p)
        out.append(abs(apply(H, psi)(p) - (1.0 + lab.rho**2) * v) / abs(v))
    return np.array(out)


def verify_quantum(seed: int = 0, rho_grid: Sequence[float] = DEFAULT_RHO_GRID,
                   tolerances: dict | None = None, quad: ChartQuadrature = ChartQuadrature()) -> VerificationReport:
    """Run the eigenvalue, ODE, ladder, hermiticity, commutator and power-ladder suites."""
    tol = dict(DEFAULT_TOLERANCES)
    for key, val in (tolerances or {}).items():
        if key not in tol:
            raise KeyError(f"unknown quantum tolerance {key!r}")
        tol[key] = float(val)
    rows: list[RelationRow] = []

    def row(name, tag, res, **extra):
        rows.append(RelationRow(name, tag, float(res), tol[name], extra))

    row("eigenvalue", "Eq. (3.33)+(3.38)", eigenvalue_residuals(50, seed).max())

    # H against -1/2 J_ij J^ij on a generic function
    pts = list(sample_spatial(10, seed + 1, 1.0))
    g = gaussian_wave((0.3, -0.2, 0.1), 1.2, (0.4, 0.1, -0.3))
    diff = Combination(((1.0, apply(hamiltonian(), g)), (-1.0, apply(casimir_hamiltonian(), g))))
    row("casimir_form", "Eq. (3.40)", max(abs(diff(p)) / (1 + abs(g(p))) for p in pts))

    fs = np.linspace(2.0, 10.0, 33)
    ode = 0.0
    for rho in rho_grid:
        for m2 in (0.0, 1.0, -1.0):
            for c1, c2 in ((1.0, 0.0), (0.0, 1.0), (0.7, -0.4j)):
                ode = max(ode, verify_radial_ode(rho, m2, fs, c1, c2))
    row("radial_ode", "Eq. (3.34)-(3.37)", ode)

    k = sample_cone_vectors(1, seed + 2)[0]
    lpts = _sample_points(50, seed + 3)
    t_res = a_minus = a_plus = kl = 0.0
    for rho in rho_grid:
        lab = PlaneWaveLabel(k, rho)
        t = ladder_action_T(lab, lpts, tol=np.inf)
        target = -(2 * rho - 1j)
        t_res = max(t_res, abs(t.coefficient - target) / abs(target), t.residual)
        am = ladder_action_KLA(lab, "A-", lpts).coefficient
        ap = ladder_action_KLA(lab, "A+", lpts).coefficient
        a_minus = max(a_minus, abs(am))
        a_plus = max(a_plus, abs(ap - 2 * sqrt_rho_shift(rho)) / abs(2 * sqrt_rho_shift(rho)))
        kc = ladder_action_KLA(lab, "K").coefficient
        kl = max(kl, abs(kc - sqrt_rho_shift(rho)))
    row("ladder_T", "Eq. (3.44)", t_res)
    row("ladder_Aminus", "Eq. (3.48)", a_minus)
    row("ladder_Aplus", "Eq. (3.49)", a_plus)
    row("ladder_KL", "Eq. (3.47)", kl)

    phi = gaussian_wave((0.2, 0.0, -0.3), 1.0, (0.5, 0.0, 0.2))
    psi = gaussian_wave((-0.1, 0.4, 0.0), 0.9, (-0.2, 0.3, 0.0))
    row("hermiticity_P", "Eq. (3.31)-(3.32)",
        max(hermiticity_residual(momentum(a), phi, psi, quad) for a in (1, 2, 3)))
    row("hermiticity_H", "Eq. (3.31)+(3.33)", hermiticity_residual(hamiltonian(), phi, psi, quad))

    cpts = pts[:5]
    jres = 0.0
    for (i, kk), (l, m) in (((1, 2), (2, 3)), ((1, 2), (3, 4)), ((4, 1), (4, 2)), ((1, 4), (1, 2)), ((2, 4), (3, 4))):
        jres = max(jres, commutator_residual(angular(i, kk), angular(l, m), j_commutator_expected(i, kk, l, m), g, cpts))
    row("commutator_J", "Eq. (3.4)", jres)
    xp = max(
        commutator_residual(momentum(a), position(b), [(-1j if a == b else 0.0, identity())], g, cpts)
        for a in (1, 2, 3) for b in (1, 2, 3)
    )
    row("commutator_XP", "Eq. (3.32)", xp)

    pl = 0.0
    for rho in rho_grid:
        lab = PlaneWaveLabel(k, rho)
        for u, v in ((0.5, 0.5), (0.7, -0.3), (-1.2, 2.0)):
            if min(abs(rho - u), abs(rho - u - v)) < 0.1:
                continue
            a = power_ladder(lab, u)
            b = power_ladder(a.shifted_label, v)
            c = power_ladder(lab, u + v)
            if abs(complex(b.shifted_label.rho) - complex(c.shifted_label.rho)) > 1e-12:
                pl = math.inf
            pl = max(pl, abs(a.coefficient * b.coefficient - c.coefficient) / abs(c.coefficient))
    row("power_ladder", "Eq. (3.67)-(3.68)", pl)
    bound = max(
        abs(power_ladder(PlaneWaveLabel(k, rho), 1j).coefficient - 2 * sqrt_rho_shift(rho))
        for rho in rho_grid
    )
    row("power_ladder_boundary", "Eq. (3.66)", bound)

    notes = {
        "prefactor_resolution": prefactor_record(rho_grid),
        "hamiltonian_factor": HAMILTONIAN_FACTOR,
        "boost_ordering": "symmetric",
    }
    return VerificationReport("quantum", rows, seed, notes=notes)


def prefactor_record(rho_grid=DEFAULT_RHO_GRID) -> dict:
    """Boundary value g(i, rho) vs 2 sqrt(rho(rho-i)) for both prefactor bases."""
    from .special import PREFACTOR_BASE, PREFACTOR_BASE_PRINTED, ladder_coefficient_squared

    out = {}
    for name, base in (("printed", PREFACTOR_BASE_PRINTED), ("corrected", PREFACTOR_BASE)):
        worst = max(
            abs(ladder_coefficient_squared(1j, rho, base) - 4.0 * rho * (rho - 1j)) for rho in rho_grid
        )
        out[name] = {"base": base, "max_abs_dev_of_square": worst}
    return out
