"""Dirac-bracket engine on the constrained phase space of H^3.

Phase-space coordinates are ``z = (x^1..x^4, p_1..p_4)`` with canonical
brackets ``{x^i, p_j} = delta^i_j``.  The constraints are
``phi1 = x.x + 1`` (gauge) and ``phi2 = x.p`` (primary).  Dirac brackets are
built generically from these two functions; the closed forms quoted for
coordinate observables are read off from the engine, never hard-coded.

Observables are plain callables on the 8 coordinates, written so that they
run on floats as well as on :class:`~hypersga.jets.Jet` values; exact
gradients and Hessians come from jet evaluation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import jets
from .geometry import GENERATOR_METRIC, METRIC, DomainError, mink_dot, sample_spatial
from .reports import RelationRow, VerificationReport

SINGULAR_DET = 1e-10
MIN_MINUS_C = 1e-8

#: The relation tables of the classical algebra are written for the bracket
#: with ``{p_i, x^j} = +delta``, the opposite overall sign of the engine's
#: ``{x^i, p_j} = +delta``.  Quantising the engine bracket with
#: ``[A, B] = i {A, B}`` gives ``[M_ab, M_cd] = -i (table)``.
PRINTED_SIGN = -1.0

# canonical symplectic matrix: {f,g} = grad f . OMEGA . grad g
OMEGA = np.block([[np.zeros((4, 4)), np.eye(4)], [-np.eye(4), np.zeros((4, 4))]])


class SingularConstraintError(RuntimeError):
    """The constraint matrix ``{phi_a, phi_b}`` is not invertible."""


@dataclass(frozen=True)
class PhasePoint:
    """Constrained pair: ``x`` upper-index, ``p`` lower-index four-vectors."""

    x: tuple
    p: tuple

    @property
    def z(self) -> np.ndarray:
        return np.concatenate([np.asarray(self.x, float), np.asarray(self.p, float)])

    def constraint_residuals(self) -> tuple[float, float]:
        x = np.asarray(self.x, float)
        p = np.asarray(self.p, float)
        return mink_dot(x, x) + 1.0, float(x @ p)


@dataclass(frozen=True)
class Observable:
    """Named phase-space function ``fn(z) -> scalar`` (jet-transparent)."""

    name: str
    fn: Callable

    def __call__(self, z):
        return self.fn(z)

    def value(self, pt) -> float:
        return float(jets.value(self.fn(list(_as_z(pt)))))

    def jet(self, pt, order: int = 1) -> jets.Jet:
        z = jets.seed(_as_z(pt), order)
        out = self.fn(z)
        if not isinstance(out, jets.Jet):
            out = jets.lift_constant(out, 8, order)
        return out

    def gradient(self, pt) -> np.ndarray:
        g = self.jet(pt, 1).grad
        if not np.all(np.isfinite(g)):
            raise FloatingPointError(f"non-finite derivative of {self.name}")
        return g

    def __add__(self, other: "Observable") -> "Observable":
        return Observable(f"({self.name}+{other.name})", lambda z: self.fn(z) + other.fn(z))

    def __sub__(self, other: "Observable") -> "Observable":
        return Observable(f"({self.name}-{other.name})", lambda z: self.fn(z) - other.fn(z))

    def __mul__(self, other):
        if isinstance(other, Observable):
            return Observable(f"{self.name}*{other.name}", lambda z: self.fn(z) * other.fn(z))
        return Observable(f"{other}*{self.name}", lambda z: other * self.fn(z))

    __rmul__ = __mul__

    def __neg__(self):
        return Observable(f"-{self.name}", lambda z: -self.fn(z))


def _as_z(pt) -> np.ndarray:
    if isinstance(pt, PhasePoint):
        return pt.z
    return np.asarray(pt, dtype=float)


# -- elementary observables ---------------------------------------------------

def x_up(i: int) -> Observable:
    """Coordinate ``x^i`` (1-based)."""
    return Observable(f"x^{i}", lambda z: z[i - 1])


def x_low(i: int) -> Observable:
    g = METRIC[i - 1]
    return Observable(f"x_{i}", lambda z: g * z[i - 1])


def p_low(i: int) -> Observable:
    """Momentum ``p_i`` (1-based)."""
    return Observable(f"p_{i}", lambda z: z[3 + i])


def p_up(i: int) -> Observable:
    g = METRIC[i - 1]
    return Observable(f"p^{i}", lambda z: g * z[3 + i])


def _xl(z, i):
    # x_i, 0-based i
    return METRIC[i] * z[i]


def _J(z, i, j):
    # J_ij = x_i p_j - x_j p_i, 0-based
    return _xl(z, i) * z[4 + j] - _xl(z, j) * z[4 + i]


def J(i: int, j: int) -> Observable:
    """Angular momentum ``J_ij = x_i p_j - x_j p_i`` (1-based, lower indices)."""
    return Observable(f"J_{i}{j}", lambda z: _J(z, i - 1, j - 1))


def _casimir(z):
    # C = 1/2 J_ij J^ij = sum_{i<j} g^ii g^jj J_ij^2
    total = 0.0
    for i, j in itertools.combinations(range(4), 2):
        total = total + METRIC[i] * METRIC[j] * _J(z, i, j) * _J(z, i, j)
    return total


def _casimir_pseudo(z):
    # eps^{ijkl} J_ij J_kl, eps^{1234} = +1
    total = 0.0
    for perm in itertools.permutations(range(4)):
        sgn = _perm_sign(perm)
        i, j, k, l = perm
        total = total + sgn * _J(z, i, j) * _J(z, k, l)
    return total


CASIMIR = Observable("C", _casimir)
CASIMIR_PSEUDO = Observable("C~", _casimir_pseudo)
PHI_GAUGE = Observable("phi1", lambda z: sum(METRIC[i] * z[i] * z[i] for i in range(4)) + 1.0)
PHI_PRIMARY = Observable("phi2", lambda z: sum(z[i] * z[4 + i] for i in range(4)))
CONSTRAINTS = (PHI_GAUGE, PHI_PRIMARY)


def _sqrt_minus_c(z):
    mc = -_casimir(z)
    if jets.value(mc) <= 0:
        raise DomainError(f"-C = {jets.value(mc)} is not positive; degenerate momentum")
    return jets.sqrt(mc)


SQRT_MINUS_C = Observable("sqrt(-C)", _sqrt_minus_c)


def _Jx(z, i):
    # J_ik x^k, 0-based i
    total = 0.0
    for k in range(4):
        if k != i:
            total = total + _J(z, i, k) * z[k]
    return total


def hamiltonian_chart(pt) -> float:
    """``1/2 (P_a^2 + (x_a P_a)^2)`` with chart momenta pulled back from ``p``.

    The chart momenta are ``P_a = p_a + p_4 x_a / x4`` (``p_4`` lower index).
    """
    z = _as_z(pt)
    xs = z[:3]
    x4 = z[3]
    P = z[4:7] + z[7] * xs / x4
    return 0.5 * (P @ P + (xs @ P) ** 2)


# -- generators of so(4,2) ------------------------------------------------------

GENERATOR_IDS = tuple(itertools.combinations(range(1, 7), 2))


def _generator_fn(a: int, b: int):
    # a < b, 1-based
    if b <= 4:
        return lambda z: _J(z, a - 1, b - 1)
    if a <= 4 and b == 5:
        # M_5i = sqrt(-C) x_i, so M_i5 = -M_5i
        return lambda z: -(_sqrt_minus_c(z) * _xl(z, a - 1))
    if a <= 4 and b == 6:
        return lambda z: -_Jx(z, a - 1)
    return _sqrt_minus_c  # (5, 6)


def realize_generator(a: int, b: int) -> Observable:
    """Observable for ``M_ab``; ``M_ba = -M_ab`` and ``M_aa = 0``."""
    if not (1 <= a <= 6 and 1 <= b <= 6):
        raise ValueError(f"generator indices must lie in 1..6, got ({a}, {b})")
    if a == b:
        return Observable(f"M_{a}{b}", lambda z: 0.0)
    if a < b:
        return Observable(f"M_{a}{b}", _generator_fn(a, b))
    fn = _generator_fn(b, a)
    return Observable(f"M_{a}{b}", lambda z: -fn(z))


def generators() -> dict[tuple[int, int], Observable]:
    return {ab: realize_generator(*ab) for ab in GENERATOR_IDS}


def _generator_values(z) -> np.ndarray:
    """Antisymmetric 6x6 matrix of generator values at ``z`` (plain floats)."""
    m = np.zeros((6, 6))
    for a, b in GENERATOR_IDS:
        v = jets.value(_generator_fn(a, b)(list(z)))
        m[a - 1, b - 1] = v
        m[b - 1, a - 1] = -v
    return m


# -- brackets -------------------------------------------------------------------

def canonical_poisson(f: Observable, g: Observable, pt) -> float:
    """``sum_i (df/dx^i dg/dp_i - df/dp_i dg/dx^i)`` in the flat R^8 chart."""
    return float(f.gradient(pt) @ OMEGA @ g.gradient(pt))


def constraint_matrix(pt) -> np.ndarray:
    grads = np.array([c.gradient(pt) for c in CONSTRAINTS])
    return grads @ OMEGA @ grads.T


def dirac_tensor(pt) -> np.ndarray:
    """Poisson bivector ``Pi`` of the Dirac bracket: ``{f,g}_D = df . Pi . dg``."""
    grads = np.array([c.gradient(pt) for c in CONSTRAINTS])
    cmat = grads @ OMEGA @ grads.T
    det = cmat[0, 0] * cmat[1, 1] - cmat[0, 1] * cmat[1, 0]
    if abs(det) < SINGULAR_DET:
        raise SingularConstraintError(f"constraint matrix determinant {det:.3e}")
    cinv = np.linalg.inv(cmat)
    left = OMEGA @ grads.T  # columns Omega dphi_a
    right = grads @ OMEGA  # rows dphi_b Omega
    return OMEGA - left @ cinv @ right


def dirac_bracket(f: Observable, g: Observable, pt) -> float:
    """``{f,g} - {f,phi_a} (C^-1)_ab {phi_b,g}`` from canonical brackets."""
    cmat = constraint_matrix(pt)
    det = cmat[0, 0] * cmat[1, 1] - cmat[0, 1] * cmat[1, 0]
    if abs(det) < SINGULAR_DET:
        raise SingularConstraintError(f"constraint matrix determinant {det:.3e}")
    cinv = np.linalg.inv(cmat)
    fphi = np.array([canonical_poisson(f, c, pt) for c in CONSTRAINTS])
    phig = np.array([canonical_poisson(c, g, pt) for c in CONSTRAINTS])
    return canonical_poisson(f, g, pt) - fphi @ cinv @ phig


def _gradient_jets(obs: Observable, pt) -> list[jets.Jet]:
    # components of grad obs as first-order jets in z
    j = obs.jet(pt, order=2)
    return [jets.Jet(j.grad[i], j.hess[i].copy()) for i in range(8)]


def _canonical_jets(ga, gb):
    total = 0.0
    for i in range(4):
        total = total + ga[i] * gb[4 + i] - ga[4 + i] * gb[i]
    return total


def dirac_bracket_jet(f: Observable, g: Observable, pt) -> jets.Jet:
    """Dirac bracket as a first-order jet: value and its gradient in ``z``."""
    gf = _gradient_jets(f, pt)
    gg = _gradient_jets(g, pt)
    gphi = [_gradient_jets(c, pt) for c in CONSTRAINTS]
    c12 = _canonical_jets(gphi[0], gphi[1])
    # C = [[0, c12], [-c12, 0]] since {phi_a, phi_a} = 0
    if abs(jets.value(c12)) ** 2 < SINGULAR_DET:
        raise SingularConstraintError("constraint matrix is singular")
    f1 = _canonical_jets(gf, gphi[0])
    f2 = _canonical_jets(gf, gphi[1])
    p1g = _canonical_jets(gphi[0], gg)
    p2g = _canonical_jets(gphi[1], gg)
    # C^-1 = [[0, -1/c12], [1/c12, 0]]
    corr = (f2 * p1g - f1 * p2g) / c12
    out = _canonical_jets(gf, gg) - corr
    if not isinstance(out, jets.Jet):
        out = jets.lift_constant(out, 8)
    return out


def dirac_gradient_matrix(observables: Sequence[Observable], pt) -> tuple[np.ndarray, np.ndarray]:
    """Gradients ``G`` (rows) of the observables and the Dirac tensor at ``pt``."""
    G = np.array([o.gradient(pt) for o in observables])
    return G, dirac_tensor(pt)


def jacobi_residual(f: Observable, g: Observable, h: Observable, pt) -> float:
    """``|{f,{g,h}} + {g,{h,f}} + {h,{f,g}}|`` for the Dirac bracket."""
    pi = dirac_tensor(pt)
    total = 0.0
    for a, b, c in ((f, g, h), (g, h, f), (h, f, g)):
        inner = dirac_bracket_jet(b, c, pt)
        total += a.gradient(pt) @ pi @ inner.grad
    return abs(total)


# -- sampling -------------------------------------------------------------------

def tangent_frame(spatial) -> np.ndarray:
    """Orthonormal tangent vectors (rows, upper index) at the lifted point.

    They are the images of the apex frame under the boost taking
    ``(0, 0, 0, 1)`` to ``x``.
    """
    s = np.asarray(spatial, float)
    x4 = math.sqrt(s @ s + 1.0)
    frame = np.zeros((3, 4))
    frame[:, :3] = np.eye(3) + np.outer(s, s) / (1.0 + x4)
    frame[:, 3] = s
    return frame


def constrained_point(spatial, proper_momentum) -> PhasePoint:
    """Lift ``spatial`` and attach the tangent momentum with frame components given."""
    s = np.asarray(spatial, float)
    x = np.array([s[0], s[1], s[2], math.sqrt(s @ s + 1.0)])
    v = np.asarray(proper_momentum, float) @ tangent_frame(s)
    return PhasePoint(tuple(x), tuple(METRIC * v))


def sample_phase_points(count: int, seed: int, radius_scale: float = 2.0,
                        momentum_scale: float = 1.0, max_resample: int = 10) -> list[PhasePoint]:
    """Seeded constrained points with ``-C`` bounded away from zero.

    Momenta are Gaussian in the local orthonormal frame, so ``-C`` is the
    squared norm of the frame components.  A degenerate draw is redrawn
    from the same stream up to ``max_resample`` times.
    """
    spatial = sample_spatial(count, seed, radius_scale)
    rng = np.random.default_rng([seed, 1])
    out = []
    for s in spatial:
        for _ in range(max_resample + 1):
            pt = constrained_point(s, momentum_scale * rng.standard_normal(3))
            if -CASIMIR.value(pt) > MIN_MINUS_C:
                break
        else:
            raise DomainError("could not draw a non-degenerate momentum")
        out.append(pt)
    return out


# -- verification suites ----------------------------------------------------------

def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def structure_rhs(m: np.ndarray, a: int, b: int, c: int, d: int) -> float:
    """so(4,2) table ``g_bc M_ad + g_ad M_bc - g_ac M_bd - g_bd M_ac`` (0-based).

    This is the right-hand side in the printed-relation convention, i.e. it
    equals ``PRINTED_SIGN * {M_ab, M_cd}_D``.
    """
    g = GENERATOR_METRIC
    return (
        (g[b] if b == c else 0.0) * m[a, d]
        + (g[a] if a == d else 0.0) * m[b, c]
        - (g[a] if a == c else 0.0) * m[b, d]
        - (g[b] if b == d else 0.0) * m[a, c]
    )


def structure_rhs_as_printed(m: np.ndarray, a: int, b: int, c: int, d: int) -> float:
    """Literal ``g_ab M_cd + g_bc M_ad - g_ac M_bd - g_bd M_ac`` (0-based).

    Kept to document that this form is not antisymmetric under
    ``(ab) <-> (cd)`` and hence cannot be a Lie bracket table.
    """
    g = GENERATOR_METRIC
    return (
        (g[a] if a == b else 0.0) * m[c, d]
        + (g[b] if b == c else 0.0) * m[a, d]
        - (g[a] if a == c else 0.0) * m[b, d]
        - (g[b] if b == d else 0.0) * m[a, c]
    )


def _generator_gradients(pt) -> np.ndarray:
    gens = generators()
    return np.array([gens[ab].gradient(pt) for ab in GENERATOR_IDS])


def structure_residuals(pt) -> np.ndarray:
    """Residuals of the 105 unordered generator pairs (row order of ``combinations``)."""
    G = _generator_gradients(pt)
    pi = dirac_tensor(pt)
    B = G @ pi @ G.T
    m = _generator_values(_as_z(pt))
    out = []
    for (p, (a, b)), (q, (c, d)) in itertools.combinations(enumerate(GENERATOR_IDS), 2):
        out.append(abs(PRINTED_SIGN * B[p, q] - structure_rhs(m, a - 1, b - 1, c - 1, d - 1)))
    return np.array(out)


def check_structure_relations(pt, tol: float = 1e-8, seed=None) -> VerificationReport:
    res = structure_residuals(pt)
    return VerificationReport.single("so42-structure", float(res.max()), tol, seed, "Eq. (2.15)")


def restrictive_values(pt) -> tuple[np.ndarray, np.ndarray, float]:
    """``T_ab = M_ac M_bd g^cd`` (6x6), ``R^ab = eps^abcdef M_cd M_ef`` (6x6), ``C~``."""
    m = _generator_values(_as_z(pt))
    g = GENERATOR_METRIC
    T = m @ np.diag(g) @ m.T
    R = np.zeros((6, 6))
    for perm in itertools.permutations(range(6)):
        a, b, c, d, e, f = perm
        if a < b:
            R[a, b] += _perm_sign(perm) * m[c, d] * m[e, f]
    R = R - R.T
    return T, R, float(CASIMIR_PSEUDO.value(pt))


def check_restrictive_relations(pt, tol: float = 1e-9, seed=None) -> VerificationReport:
    T, R, ct = restrictive_values(pt)
    rows = [
        RelationRow("restrictive-T", "Eq. (2.17)", float(np.abs(T).max()), tol),
        RelationRow("restrictive-R", "Eq. (2.17)", float(np.abs(R).max()), tol),
        RelationRow("casimir-pseudo", "Eq. (2.1)", abs(ct), tol),
    ]
    return VerificationReport("restrictive", rows, seed)


def _sqrtc_identities():
    """(name, tag, (f, g), rhs) with ``PRINTED_SIGN * {f, g}_D = rhs``."""
    sq = SQRT_MINUS_C
    c = CASIMIR
    out = []
    for i in range(1, 5):
        xi = x_low(i)
        Li = Observable(f"J_{i}k x^k", lambda z, i=i: _Jx(z, i - 1))
        out.append((f"C,x_{i}", "Eq. (2.8)", (c, xi), -2 * Li))
        out.append((f"C,Jx_{i}", "Eq. (2.8)", (c, Li), 2 * (c * xi)))
        out.append((f"sqrtC,x_{i}sqrtC", "Eq. (2.9)", (sq, xi * sq), Li))
        # printed right-hand side sqrt(-C) x_i lacks a factor sqrt(-C)
        out.append((f"sqrtC,Jx_{i}sqrtC", "Eq. (2.10)", (sq, Li * sq), sq * (sq * xi)))
    for i in range(1, 5):
        for j in range(1, 5):
            Ki = Observable(f"sx_{i}", lambda z, i=i: _sqrt_minus_c(z) * _xl(z, i - 1))
            Kj = Observable(f"sx_{j}", lambda z, j=j: _sqrt_minus_c(z) * _xl(z, j - 1))
            Li = Observable(f"Jx_{i}", lambda z, i=i: _Jx(z, i - 1))
            Lj = Observable(f"Jx_{j}", lambda z, j=j: _Jx(z, j - 1))
            gij = GENERATOR_METRIC[i - 1] if i == j else 0.0
            out.append((f"sx_{i},sx_{j}", "Eq. (2.11)", (Ki, Kj), J(i, j)))
            out.append((f"Jx_{i},Jx_{j}", "Eq. (2.12)", (Li, Lj), -1 * J(i, j)))
            out.append((f"sx_{i},Jx_{j}", "Eq. (2.13)", (Ki, Lj), (-gij) * SQRT_MINUS_C))
    return out


def sqrtc_residuals(pt) -> dict[str, float]:
    """Max residual per identity tag for the sqrt(-C) bracket family."""
    worst: dict[str, float] = {}
    pi = dirac_tensor(pt)
    for _name, tag, (f, g), rhs in _sqrtc_identities():
        lhs = PRINTED_SIGN * (f.gradient(pt) @ pi @ g.gradient(pt))
        r = abs(lhs - rhs.value(pt))
        worst[tag] = max(worst.get(tag, 0.0), r)
    return worst


def check_sqrtC_relations(pt, tol: float = 1e-8, seed=None) -> VerificationReport:
    rows = [RelationRow(f"sqrtC {tag}", tag, r, tol) for tag, r in sqrtc_residuals(pt).items()]
    return VerificationReport("sqrtC", rows, seed)


def constraint_bracket_residual(pt) -> float:
    """Max ``|{phi_a, M_bc}_D|`` over both constraints and all generators."""
    G = _generator_gradients(pt)
    pi = dirac_tensor(pt)
    C = np.array([c.gradient(pt) for c in CONSTRAINTS])
    return float(np.abs(C @ pi @ G.T).max())


def antisymmetry_residual(pt) -> float:
    """``max |B + B^T| / max(1, max |B|)`` over the generator bracket matrix ``B``."""
    G = _generator_gradients(pt)
    B = G @ dirac_tensor(pt) @ G.T
    return float(np.abs(B + B.T).max() / max(1.0, np.abs(B).max()))


def dirac_closed_forms(pt) -> dict[str, float]:
    """Max deviation of coordinate Dirac brackets from the engine-derived closed forms.

    ``{x^i, x^j}_D = 0``, ``{x^i, p_j}_D = delta^i_j + x^i x_j``,
    ``{p_i, p_j}_D = J_ij`` (all on the constraint surface).
    """
    z = _as_z(pt)
    pi = dirac_tensor(pt)
    x = z[:4]
    xl = METRIC * x
    xx = pi[:4, :4]
    xp = pi[:4, 4:]
    pp = pi[4:, 4:]
    jmat = np.array([[_J(z, i, j) for j in range(4)] for i in range(4)])
    return {
        "{x^i,x^j}=0": float(np.abs(xx).max()),
        "{x^i,p_j}=delta+x^i x_j": float(np.abs(xp - (np.eye(4) + np.outer(x, xl))).max()),
        "{x^i,p_j}=delta-x^i x_j": float(np.abs(xp - (np.eye(4) - np.outer(x, xl))).max()),
        "{p_i,p_j}=J_ij": float(np.abs(pp - jmat).max()),
    }



# -- suite ------------------------------------------------------------------------

DEFAULT_TOLERANCES = {
    "structure": 1e-8,
    "restrictive": 1e-9,
    "casimir_pseudo": 1e-10,
    "sqrtC": 1e-8,
    "jacobi": 1e-7,
    "first_class": 1e-9,
    "antisymmetry": 1e-9,
    "hamiltonian_chart": 1e-10,
}


def verify_classical(seed: int = 0, points: int = 200, tolerances: dict | None = None,
                     ladder_points: int = 50, jacobi_points: int = 20, jacobi_triples: int = 20,
                     radius_scale: float = 2.0) -> VerificationReport:
    """Run every classical relation over seeded constrained points.

    The structure table uses ``points`` points; the restrictive relations use
    the same points, the bracket-ladder identities the first
    ``ladder_points`` of them and the Jacobi check ``jacobi_triples`` random
    generator triples at ``jacobi_points`` points.
    """
    tol = dict(DEFAULT_TOLERANCES)
    for key, val in (tolerances or {}).items():
        if key not in tol:
            raise KeyError(f"unknown classical tolerance {key!r}")
        tol[key] = float(val)
    pts = sample_phase_points(points, seed, radius_scale)
    worst = {k: 0.0 for k in ("structure", "T", "R", "Ct", "first", "anti", "ham")}
    ladder: dict[str, float] = {}
    for k, pt in enumerate(pts):
        worst["structure"] = max(worst["structure"], float(structure_residuals(pt).max()))
        T, R, ct = restrictive_values(pt)
        worst["T"] = max(worst["T"], float(np.abs(T).max()))
        worst["R"] = max(worst["R"], float(np.abs(R).max()))
        worst["Ct"] = max(worst["Ct"], abs(ct))
        worst["first"] = max(worst["first"], constraint_bracket_residual(pt))
        worst["anti"] = max(worst["anti"], antisymmetry_residual(pt))
        # -C = P^2 + (x.P)^2, twice the chart expression with the 1/2
        worst["ham"] = max(worst["ham"], abs(-CASIMIR.value(pt) - 2.0 * hamiltonian_chart(pt)))
        if k < ladder_points:
            for tag, r in sqrtc_residuals(pt).items():
                ladder[tag] = max(ladder.get(tag, 0.0), r)

    gens = generators()
    rng = np.random.default_rng([seed, 2])
    jac = 0.0
    for pt in pts[:jacobi_points]:
        for _ in range(jacobi_triples):
            a, b, c = rng.choice(len(GENERATOR_IDS), size=3, replace=False)
            jac = max(jac, jacobi_residual(gens[GENERATOR_IDS[a]], gens[GENERATOR_IDS[b]],
                                           gens[GENERATOR_IDS[c]], pt))

    rows = [
        RelationRow("so42-structure", "Eq. (2.15)", worst["structure"], tol["structure"],
                    {"points": points, "pairs": 105}),
        RelationRow("restrictive-T", "Eq. (2.17)", worst["T"], tol["restrictive"]),
        RelationRow("restrictive-R", "Eq. (2.17)", worst["R"], tol["restrictive"]),
        RelationRow("casimir-pseudo", "Eq. (2.1)", worst["Ct"], tol["casimir_pseudo"]),
    ]
    rows += [RelationRow(f"sqrtC {tag}", tag, r, tol["sqrtC"], {"points": min(points, ladder_points)})
             for tag, r in sorted(ladder.items())]
    rows += [
        RelationRow("jacobi", "Eq. (2.15)", jac, tol["jacobi"],
                    {"points": min(points, jacobi_points), "triples": jacobi_triples}),
        RelationRow("constraints-first-class", "Eq. (dirac)", worst["first"], tol["first_class"]),
        RelationRow("antisymmetry", "Eq. (dirac)", worst["anti"], tol["antisymmetry"]),
        RelationRow("hamiltonian-chart", "Eq. (2.5)", worst["ham"], tol["hamiltonian_chart"]),
    ]
    closed = dirac_closed_forms(pts[0])
    notes = {
        "dirac_closed_form": {k: v for k, v in closed.items()},
        "dirac_closed_form_selected": min(
            ("{x^i,p_j}=delta+x^i x_j", "{x^i,p_j}=delta-x^i x_j"), key=closed.get),
        "bracket_sign_convention": PRINTED_SIGN,
    }
    return VerificationReport("classical", rows, seed, notes=notes)
