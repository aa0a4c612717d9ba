"""Gelfand-Graev / Shapiro-wave analysis and synthesis on H^3.

Forward transform::

    phi(n, rho) = int d^3x / x4  f(x) q(x, n)^(-1 + i rho),   q = x.n + x4 > 0

(past-cone section ``k = (n, -1)``).  Inverse::

    f(x) = 1/(16 pi^3) int drho rho^2 int dn  phi(n, rho) q(x, n)^(-1 - i rho)

Both integrals are done in coordinates adapted to ``n``: with ``r = |x|``,
``s = log q`` and the azimuth around ``n``, the kernel becomes ``exp(i rho
s)`` and ``d^3x / x4 = r e^s dr ds dazimuth / x4``.  The ``s`` nodes do not
depend on ``n``, so all directions and all ``rho`` are one matrix product.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.special import eval_legendre, sph_harm_y

from .geometry import ConeVector, HyperPoint
from .quadrature import SphereRule, gauss_legendre, orthonormal_frame

INVERSE_CONSTANT = 1.0 / (16.0 * math.pi**3)
SIGMA = -1
PHASE_CONVENTION = "q^(-1+i*rho), q=x.n+x4>0"


class TruncationWarning(UserWarning):
    """A quadrature window or spectral window looks too small."""


class TruncationError(RuntimeError):
    def __init__(self, message: str, suggested_radius: float | None = None):
        super().__init__(message)
        self.suggested_radius = suggested_radius


# -- test functions ----------------------------------------------------------------------

@dataclass(frozen=True)
class HyperFunction:
    """Function on the chart, vectorised over points of shape ``(..., 3)``.

    ``decay`` is ``"gaussian-damped"`` (``|f| <= C exp(-|x - c|^2 / s^2)``),
    ``"compact"`` (support in the ball of radius ``s`` about ``c``) or
    ``"generic"``.
    """

    name: str
    fn: Callable = field(repr=False, compare=False)
    decay: str = "gaussian-damped"
    scale: float = 1.0
    center: tuple = (0.0, 0.0, 0.0)
    bound: float = 1.0
    real: bool = True
    params: tuple = ()

    def __call__(self, x):
        if isinstance(x, HyperPoint):
            x = x.spatial
        return self.fn(np.asarray(x, dtype=float))

    def __rmul__(self, c):
        c = complex(c)
        real = self.real and c.imag == 0
        return replace(self, name=f"{c}*{self.name}", fn=lambda x, f=self.fn: c * f(x),
                       bound=abs(c) * self.bound, real=real)

    @property
    def radius(self) -> float:
        """Radius of the chart ball that holds the function numerically."""
        c = float(np.linalg.norm(self.center))
        if self.decay == "compact":
            return c + self.scale
        return c + 6.0 * self.scale


def _r2(x, c):
    d = x - np.asarray(c, dtype=float)
    return np.einsum("...i,...i->...", d, d)


def radial_gaussian(width: float = 1.0) -> HyperFunction:
    w2 = float(width) ** 2
    return HyperFunction(
        "radial_gaussian", lambda x: np.exp(-_r2(x, (0.0, 0.0, 0.0)) / (2.0 * w2)),
        scale=math.sqrt(2.0) * width, params=(("width", width),),
    )


def gaussian(s: float = 1.0) -> HyperFunction:
    """``exp(-|x|^2 / s^2)``, the radial Gaussian parametrised by its decay scale."""
    s2 = float(s) ** 2
    return HyperFunction(
        "gaussian", lambda x: np.exp(-_r2(x, (0.0, 0.0, 0.0)) / s2), scale=float(s), params=(("s", s),),
    )


def offcenter_bump(center=(0.8, -0.4, 0.3), width: float = 0.7) -> HyperFunction:
    c = tuple(float(v) for v in center)
    w2 = float(width) ** 2
    return HyperFunction(
        "offcenter_bump", lambda x: np.exp(-_r2(x, c) / (2.0 * w2)),
        scale=math.sqrt(2.0) * width, center=c, params=(("center", c), ("width", width)),
    )


def modulated_gaussian(width: float = 1.0, wavevector=(1.5, 0.0, 0.5)) -> HyperFunction:
    """Gaussian times the Euclidean plane wave ``exp(i b.x)``."""
    b = np.asarray(wavevector, dtype=float)
    w2 = float(width) ** 2
    return HyperFunction(
        "modulated_gaussian",
        lambda x: np.exp(-_r2(x, (0.0, 0.0, 0.0)) / (2.0 * w2) + 1j * (x @ b)),
        scale=math.sqrt(2.0) * width, real=False,
        params=(("width", width), ("wavevector", tuple(b))),
    )


def compact_bump(center=(0.3, 0.2, -0.1), radius: float = 1.5) -> HyperFunction:
    """``exp(1 - 1/(1 - |x - c|^2 / a^2))`` inside the ball, zero outside."""
    c = tuple(float(v) for v in center)
    a2 = float(radius) ** 2

    def fn(x):
        u = _r2(x, c) / a2
        out = np.zeros(np.shape(u))
        inside = u < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside]))
        return out

    return HyperFunction("compact_bump", fn, decay="compact", scale=float(radius), center=c,
                         params=(("center", c), ("radius", radius)))


BUILTINS = {
    "gaussian": gaussian,
    "radial_gaussian": radial_gaussian,
    "offcenter_bump": offcenter_bump,
    "modulated_gaussian": modulated_gaussian,
    "compact_bump": compact_bump,
}


def make_function(name: str, **params) -> HyperFunction:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown test function {name!r}; choose from {sorted(BUILTINS)}") from None
    return factory(**params)


def plancherel_suite() -> list[HyperFunction]:
    """Five test functions of different shape, decay and symmetry."""
    return [
        radial_gaussian(1.0),
        radial_gaussian(0.6),
        offcenter_bump(),
        modulated_gaussian(),
        compact_bump(),
    ]


# -- quadrature specification -------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts for the transform pair.

    ``radius=None`` takes the radius from the function's decay class.
    """

    sphere_degree: int = 23
    radial_order: int = 48
    slice_order: int = 64
    azimuth: int = 32
    radius: float | None = None
    rho_max: float = 24.0
    rho_count: int = 481
    check_sphere_degree: int = 17
    check_radial_order: int = 32

    KEYS = ("sphere_degree", "radial_order", "slice_order", "azimuth", "radius",
            "rho_max", "rho_count", "check_sphere_degree", "check_radial_order")

    def __post_init__(self):
        if self.rho_count < 3 or self.rho_count % 2 == 0:
            raise ValueError("rho_count must be odd and at least 3 (symmetric grid through 0)")
        for k in ("sphere_degree", "radial_order", "slice_order", "azimuth"):
            if getattr(self, k) < 1:
                raise ValueError(f"{k} must be positive")
        if not self.rho_max > 0:
            raise ValueError("rho_max must be positive")

    def with_overrides(self, overrides: dict) -> "QuadratureSpec":
        conv = {}
        for k, v in overrides.items():
            if k not in self.KEYS:
                raise KeyError(f"unknown quadrature key {k!r}")
            if k in ("rho_max",):
                conv[k] = float(v)
            elif k == "radius":
                conv[k] = None if v in (None, "auto") else float(v)
            else:
                conv[k] = int(v)
        return replace(self, **conv)

    def sphere(self) -> SphereRule:
        return SphereRule.product(self.sphere_degree)

    def rho_grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Uniform symmetric grid and trapezoid weights."""
        rho = np.linspace(-self.rho_max, self.rho_max, self.rho_count)
        w = np.full(self.rho_count, rho[1] - rho[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        return rho, w

    def radius_for(self, f: HyperFunction) -> float:
        return float(self.radius) if self.radius is not None else f.radius


# -- spectral function ------------------------------------------------------------------------

@dataclass
class SpectralFunction:
    """``phi(n_j, rho_m)`` on the unit section ``k = (n, -1)``."""

    rule_id: str
    nodes: np.ndarray
    weights: np.ndarray
    rho: np.ndarray
    values: np.ndarray
    source_real: bool = False
    sigma: int = SIGMA
    phase: str = PHASE_CONVENTION

    def __post_init__(self):
        if self.values.shape != (self.nodes.shape[0], self.rho.shape[0]):
            raise ValueError("values must have shape (nodes, rho)")

    @property
    def rho_weights(self) -> np.ndarray:
        d = self.rho[1] - self.rho[0]
        w = np.full(self.rho.shape[0], d)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def at_cone(self, j: int, m: int, omega: float) -> complex:
        """Value at ``k = omega (n_j, -1)`` by homogeneity of degree ``-1 + i rho``."""
        return complex(self.values[j, m] * omega ** (-1.0 + 1j * self.rho[m]))

    def __add__(self, other: "SpectralFunction") -> "SpectralFunction":
        return replace(self, values=self.values + other.values,
                       source_real=self.source_real and other.source_real)

    def __rmul__(self, c) -> "SpectralFunction":
        c = complex(c)
        return replace(self, values=c * self.values, source_real=self.source_real and c.imag == 0)

    def header(self) -> dict:
        return {
            "format": "hypersga-spectral-v1",
            "rule_id": self.rule_id,
            "node_count": str(self.nodes.shape[0]),
            "rho_min": repr(float(self.rho[0])),
            "rho_max": repr(float(self.rho[-1])),
            "rho_count": str(self.rho.shape[0]),
            "sigma": str(self.sigma),
            "phase": self.phase,
            "source_real": str(bool(self.source_real)),
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            for k, v in self.header().items():
                fh.write(f"# {k}={v}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["j", "m", "n_x", "n_y", "n_z", "weight", "rho", "re_phi", "im_phi"])
            for j in range(self.nodes.shape[0]):
                n = self.nodes[j]
                for m in range(self.rho.shape[0]):
                    v = self.values[j, m]
                    w.writerow([j, m, repr(float(n[0])), repr(float(n[1])), repr(float(n[2])),
                                repr(float(self.weights[j])), repr(float(self.rho[m])),
                                repr(float(v.real)), repr(float(v.imag))])

    @classmethod
    def from_csv(cls, path) -> "SpectralFunction":
        header = {}
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
        body = []
        for line in lines:
            if line.startswith("# "):
                k, _, v = line[2:].partition("=")
                header[k] = v
            else:
                body.append(line)
        if header.get("format") != "hypersga-spectral-v1":
            raise ValueError(f"{path}: not a spectral function file")
        J = int(header["node_count"])
        M = int(header["rho_count"])
        rows = list(csv.reader(body))[1:]
        if len(rows) != J * M:
            raise ValueError(f"{path}: expected {J * M} rows, found {len(rows)}")
        data = np.array([[float(c) for c in r[2:]] for r in rows]).reshape(J, M, 7)
        sf = cls(
            rule_id=header["rule_id"],
            nodes=data[:, 0, 0:3].copy(),
            weights=data[:, 0, 3].copy(),
            rho=data[0, :, 4].copy(),
            values=data[:, :, 5] + 1j * data[:, :, 6],
            source_real=header["source_real"] == "True",
            sigma=int(header["sigma"]),
            phase=header["phase"],
        )
        if sf.header() != header:
            raise ValueError(f"{path}: header does not match the table")
        return sf


# -- cone functions ---------------------------------------------------------------------

@dataclass(frozen=True)
class ConeFunction:
    """``h(omega, n)`` on the past cone; ``log_support`` bounds ``log omega``."""

    fn: Callable = field(compare=False)
    log_support: tuple = (-40.0, 5.0)
    name: str = ""

    def __call__(self, omega, n):
        return self.fn(omega, n)


# -- forward ------------------------------------------------------------------------------

def _slice_nodes(quad: QuadratureSpec, R: float):
    """Radial GL nodes and, per shell, GL nodes in s on ``[-asinh r, asinh r]``."""
    r, wr = gauss_legendre(quad.radial_order, 0.0, R)
    x4 = np.sqrt(1.0 + r * r)
    t = np.arcsinh(r)
    u, wu = np.polynomial.legendre.leggauss(quad.slice_order)
    s = t[:, None] * u[None, :]
    ws = t[:, None] * wu[None, :]
    c = np.clip((np.exp(s) - x4[:, None]) / r[:, None], -1.0, 1.0)
    weight = (wr * r / x4)[:, None] * ws
    return r, s, c, weight


def _azimuthal_means(f: HyperFunction, nodes: np.ndarray, r, c, n_az: int) -> np.ndarray:
    """``F[j, i, l] = int dazimuth f`` on the circle ``(r_i, c_il)`` about ``n_j``."""
    az = 2.0 * np.pi * np.arange(n_az) / n_az
    ca, sa = np.cos(az), np.sin(az)
    rc = r[:, None] * c
    rs = r[:, None] * np.sqrt(np.clip(1.0 - c * c, 0.0, None))
    out = np.empty((nodes.shape[0],) + c.shape, dtype=complex)
    for j, n in enumerate(nodes):
        e1, e2 = orthonormal_frame(n)
        perp = ca[:, None] * e1[None, :] + sa[:, None] * e2[None, :]
        x = rc[..., None, None] * n + rs[..., None, None] * perp
        out[j] = f(x).sum(axis=-1) * (2.0 * np.pi / n_az)
    return out


def tail_ratio(f: HyperFunction, R: float, samples: int = 200) -> float:
    """``max |f|`` on the sphere of radius ``R`` relative to ``max |f|`` near the center."""
    rule = SphereRule.product(14)
    outer = np.abs(f(R * rule.nodes)).max()
    c = np.asarray(f.center, dtype=float)
    inner = max(abs(complex(np.ravel(f(c[None, :]))[0])), np.abs(f(0.5 * f.scale * rule.nodes + c)).max())
    return float(outer / inner) if inner > 0 else 0.0


def forward_transform(f: HyperFunction, quad: QuadratureSpec = QuadratureSpec(),
                      nodes: np.ndarray | None = None, rho: np.ndarray | None = None) -> SpectralFunction:
    """``phi(n, rho)`` on the sphere rule and rho grid of ``quad``."""
    if f.decay == "generic" and quad.radius is None:
        raise TruncationError("generic functions need an explicit quadrature radius")
    R = quad.radius_for(f)
    tail = tail_ratio(f, R)
    if tail > 1e-3:
        raise TruncationError(f"{f.name}: |f| at R={R:g} is {tail:.2e} of its peak",
                              suggested_radius=R + 3.0 * f.scale)
    rule = quad.sphere()
    if nodes is None:
        nodes, weights, rule_id = rule.nodes, rule.weights, rule.rule_id
    else:
        nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
        weights, rule_id = np.full(nodes.shape[0], np.nan), "custom"
    if rho is None:
        rho, _ = quad.rho_grid()
    r, s, c, weight = _slice_nodes(quad, R)
    F = _azimuthal_means(f, nodes, r, c, quad.azimuth)
    A = (F * weight).reshape(nodes.shape[0], -1)
    E = np.exp(1j * np.outer(s.ravel(), rho))
    return SpectralFunction(rule_id, nodes, weights, np.asarray(rho, float), A @ E, source_real=f.real)


# -- inverse ------------------------------------------------------------------------------

def _as_points(x) -> np.ndarray:
    if isinstance(x, HyperPoint):
        return x.spatial[None, :]
    x = np.asarray(x, dtype=float)
    return x[None, :] if x.ndim == 1 else x


def spectral_tail_mass(phi: SpectralFunction, fraction: float = 0.8) -> float:
    """Share of ``int rho^2 |phi|^2`` carried by ``|rho| > fraction * rho_max``."""
    dens = (phi.rho**2 * phi.rho_weights) * ((np.abs(phi.values) ** 2).T @ np.nan_to_num(phi.weights, nan=0.0))
    total = dens.sum()
    if total == 0:
        return 0.0
    edge = np.abs(phi.rho) > fraction * np.abs(phi.rho).max()
    return float(dens[edge].sum() / total)


def _rule_degree(phi: SpectralFunction) -> int:
    prefix = "gl-trap-"
    if not phi.rule_id.startswith(prefix):
        raise ValueError(f"no exactness degree known for rule {phi.rule_id!r}")
    return int(phi.rule_id[len(prefix):])


def sh_matrix(nodes: np.ndarray, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Complex spherical harmonics ``Y_lm`` at unit vectors, columns ordered by (l, m)."""
    theta = np.arccos(np.clip(nodes[:, 2], -1.0, 1.0))
    az = np.arctan2(nodes[:, 1], nodes[:, 0])
    cols, ell = [], []
    for l in range(L + 1):
        for m in range(-l, l + 1):
            cols.append(sph_harm_y(l, m, theta, az))
            ell.append(l)
    return np.array(cols).T, np.array(ell)


def funk_hecke_kernel(r: float, rho: np.ndarray, L: int, nodes: int | None = None) -> np.ndarray:
    """``K_l(r, rho) = 2 pi int_{-1}^{1} P_l(c) (r c + x4)^{-1 - i rho} dc``, shape ``(L+1, len(rho))``.

    Integrated in ``s = log(r c + x4)`` where the kernel is ``exp(-i rho s)``.
    """
    rho = np.asarray(rho, dtype=float)
    if r < 1e-12:
        K = np.zeros((L + 1, rho.shape[0]), dtype=complex)
        K[0] = 4.0 * np.pi
        return K
    t = math.asinh(r)
    x4 = math.sqrt(1.0 + r * r)
    if nodes is None:
        nodes = max(64, int(t * np.abs(rho).max()) + 32)
    u, wu = np.polynomial.legendre.leggauss(nodes)
    s = t * u
    c = np.clip((np.exp(s) - x4) / r, -1.0, 1.0)
    P = np.array([eval_legendre(l, c) for l in range(L + 1)])
    return (2.0 * np.pi / r) * (P * (t * wu)) @ np.exp(-1j * np.outer(s, rho))


def inverse_transform(phi: SpectralFunction, x, method: str = "funk-hecke",
                      tail_tol: float = 1e-8, chunk: int = 1024) -> np.ndarray:
    """Synthesis at chart points ``x`` (shape ``(3,)`` or ``(P, 3)``).

    ``method="funk-hecke"`` (default) expands ``phi(., rho)`` in spherical
    harmonics up to ``l = degree // 2``, where the stored rule is exact,
    and integrates every harmonic against ``q^{-1-i rho}`` exactly in the
    direction variable (Funk-Hecke), leaving a smooth 1-D integral in
    ``log q``.  ``method="direct"`` sums the rule nodes against the kernel;
    it aliases far from the origin, where the kernel concentrates near the
    direction opposite to ``x``.  For a real source only ``rho >= 0`` is
    summed and twice the real part is taken.
    """
    if np.any(np.isnan(phi.weights)):
        raise ValueError("spectral function has no direction weights (custom nodes)")
    tail = spectral_tail_mass(phi)
    if tail > tail_tol:
        warnings.warn(f"spectral tail mass {tail:.2e} beyond 80% of the rho window", TruncationWarning)
    pts = _as_points(x)
    rho = phi.rho
    w_rho = phi.rho_weights * rho**2
    if method == "direct":
        out = _inverse_direct(phi, pts, w_rho, chunk)
    elif method == "funk-hecke":
        out = _inverse_funk_hecke(phi, pts, w_rho)
    else:
        raise ValueError(f"unknown inverse method {method!r}")
    out *= INVERSE_CONSTANT
    return out.real if phi.source_real else out


def _half_spectrum(phi: SpectralFunction, coef: np.ndarray):
    rho = phi.rho
    if not phi.source_real:
        return rho, coef
    keep = rho >= 0
    rho = rho[keep]
    coef = coef[:, keep].copy()
    coef[:, rho > 0] *= 2.0
    return rho, coef


def _inverse_funk_hecke(phi: SpectralFunction, pts: np.ndarray, w_rho: np.ndarray) -> np.ndarray:
    L = _rule_degree(phi) // 2
    Y, ell = sh_matrix(phi.nodes, L)
    a = (Y.conj() * phi.weights[:, None]).T @ phi.values
    rho, coef = _half_spectrum(phi, a * w_rho[None, :])
    r = np.sqrt(np.einsum("ij,ij->i", pts, pts))
    radii, which = np.unique(np.round(r, 13), return_inverse=True)
    B = np.empty((radii.shape[0], ell.shape[0]), dtype=complex)
    for i, rr in enumerate(radii):
        K = funk_hecke_kernel(float(rr), rho, L)
        B[i] = np.sum(coef * K[ell], axis=1)
    safe = np.where(r > 0, r, 1.0)
    dirs = pts / safe[:, None]
    dirs[r == 0] = (0.0, 0.0, 1.0)
    Yx, _ = sh_matrix(dirs, L)
    return np.sum(B[which.ravel()] * Yx, axis=1)


def _inverse_direct(phi: SpectralFunction, pts: np.ndarray, w_rho: np.ndarray, chunk: int) -> np.ndarray:
    # Horner's rule in exp(-i drho log q) over the uniform rho grid
    rho, coef = _half_spectrum(phi, w_rho[None, :] * phi.values * phi.weights[:, None])
    drho = rho[1] - rho[0]
    out = np.empty(pts.shape[0], dtype=complex)
    for a in range(0, pts.shape[0], chunk):
        p = pts[a:a + chunk]
        x4 = np.sqrt(1.0 + np.einsum("ij,ij->i", p, p))
        q = p @ phi.nodes.T + x4[:, None]
        ls = np.log(q)
        z = np.exp(-1j * drho * ls)
        acc = np.zeros(q.shape, dtype=complex)
        for m in range(rho.shape[0] - 1, -1, -1):
            acc = acc * z + coef[:, m]
        acc *= np.exp(-1j * rho[0] * ls) / q
        out[a:a + chunk] = acc.sum(axis=1)
    return out


# -- norms, round trip, Plancherel --------------------------------------------------------

def chart_rule(quad: QuadratureSpec, R: float) -> tuple[np.ndarray, np.ndarray]:
    """Points and ``Dx = d^3x / x4`` weights on the ball of radius ``R``."""
    rule = SphereRule.product(quad.check_sphere_degree)
    r, wr = gauss_legendre(quad.check_radial_order, 0.0, R)
    pts = (r[:, None, None] * rule.nodes[None]).reshape(-1, 3)
    w = (wr[:, None] * (r * r / np.sqrt(1.0 + r * r))[:, None] * rule.weights[None]).ravel()
    return pts, w


def l2_norm(f: HyperFunction, quad: QuadratureSpec = QuadratureSpec()) -> float:
    pts, w = chart_rule(quad, quad.radius_for(f))
    return float(np.sqrt(np.sum(w * np.abs(f(pts)) ** 2)))


@dataclass(frozen=True)
class RoundTrip:
    name: str
    rel_l2_error: float
    norm: float
    spectral_tail: float


def roundtrip_error(f: HyperFunction, quad: QuadratureSpec = QuadratureSpec(),
                    phi: SpectralFunction | None = None) -> RoundTrip:
    """Relative ``L^2(Dx)`` error of inverse(forward(f)) on the chart ball."""
    if phi is None:
        phi = forward_transform(f, quad)
    pts, w = chart_rule(quad, quad.radius_for(f))
    fv = f(pts)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        rec = inverse_transform(phi, pts)
    norm = float(np.sqrt(np.sum(w * np.abs(fv) ** 2)))
    err = float(np.sqrt(np.sum(w * np.abs(rec - fv) ** 2))) / norm
    return RoundTrip(f.name, err, norm, spectral_tail_mass(phi))


def resample_rho(phi: SpectralFunction, step: int) -> SpectralFunction:
    """Every ``step``-th rho node (keeps the grid symmetric when possible)."""
    M = phi.rho.shape[0]
    if (M - 1) % step:
        raise ValueError("step must divide rho_count - 1")
    return replace(phi, rho=phi.rho[::step].copy(), values=phi.values[:, ::step].copy())


@dataclass(frozen=True)
class RhoRefinement:
    """Round-trip behaviour under 2x refinements of the rho grid.

    ``errors`` are relative ``L^2(Dx)`` distances to ``f``; ``increments``
    are distances between reconstructions on successive grids, which
    isolate the rho-discretisation error from the (much smaller, fixed)
    error of the other rules.  ``orders`` are ``log2`` of successive
    increment ratios.
    """

    spacings: tuple
    errors: tuple
    increments: tuple
    orders: tuple

    @property
    def min_order(self) -> float:
        return min(self.orders) if self.orders else math.nan

    @property
    def monotone(self) -> bool:
        return all(b <= a * 1.01 for a, b in zip(self.errors, self.errors[1:]))


def rho_refinement(f: HyperFunction, quad: QuadratureSpec = QuadratureSpec(), levels: int = 3,
                   noise: float = 1e-13) -> RhoRefinement:
    """Start at the grid of ``quad`` and halve the rho spacing ``levels - 1`` times.

    All grids are nested subsets of one forward transform on the finest
    grid, so only the rho discretisation changes between them.  Orders are
    reported only where both increments are above ``noise``.
    """
    fine = replace(quad, rho_count=(quad.rho_count - 1) * 2 ** (levels - 1) + 1)
    phi = forward_transform(f, fine)
    pts, w = chart_rule(quad, quad.radius_for(f))
    fv = f(pts)
    norm = math.sqrt(float(np.sum(w * np.abs(fv) ** 2)))

    def dist(a, b):
        return math.sqrt(float(np.sum(w * np.abs(a - b) ** 2))) / norm

    recs, spacings = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for lev in range(levels):
            sub = resample_rho(phi, 2 ** (levels - 1 - lev))
            spacings.append(float(sub.rho[1] - sub.rho[0]))
            recs.append(inverse_transform(sub, pts))
    errors = tuple(dist(r, fv) for r in recs)
    incs = tuple(dist(a, b) for a, b in zip(recs, recs[1:]))
    orders = tuple(
        math.log2(a / b) for a, b in zip(incs, incs[1:]) if a > noise and b > noise
    )
    return RhoRefinement(tuple(spacings), errors, incs, orders)


@dataclass(frozen=True)
class PlancherelResult:
    name: str
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs


def plancherel_check(f: HyperFunction, quad: QuadratureSpec = QuadratureSpec(),
                     phi: SpectralFunction | None = None) -> PlancherelResult:
    """``int Dx |f|^2`` against ``1/(16 pi^3) int rho^2 drho int dn |phi|^2``."""
    if phi is None:
        phi = forward_transform(f, quad)
    lhs = l2_norm(f, quad) ** 2
    dens = (np.abs(phi.values) ** 2 * phi.weights[:, None]).sum(axis=0)
    rhs = INVERSE_CONSTANT * float(np.sum(phi.rho_weights * phi.rho**2 * dens))
    return PlancherelResult(f.name, lhs, rhs)


# -- Gelfand-Graev route -----------------------------------------------------------------------

def _gg_profile(f: HyperFunction, n, s0: np.ndarray, quad: QuadratureSpec, R: float) -> np.ndarray:
    """``e^{-s0} h(e^{-s0} (n, -1))`` for an array of ``s0`` (zero outside the support)."""
    n = np.asarray(n, dtype=float)
    T = math.asinh(R)
    e1, e2 = orthonormal_frame(n)
    az = 2.0 * np.pi * np.arange(quad.azimuth) / quad.azimuth
    perp = np.cos(az)[:, None] * e1 + np.sin(az)[:, None] * e2
    u, wu = np.polynomial.legendre.leggauss(quad.radial_order)
    out = np.zeros(s0.shape, dtype=complex)
    for a, sv in enumerate(s0):
        lo = abs(sv)
        if lo >= T:
            continue
        t = lo + (T - lo) * 0.5 * (u + 1.0)
        wt = (T - lo) * 0.5 * wu
        sh, ch = np.sinh(t), np.cosh(t)
        c = np.clip((math.exp(sv) - ch) / np.where(sh > 0, sh, 1.0), -1.0, 1.0)
        rc = sh * c
        rs = sh * np.sqrt(1.0 - c * c)
        x = rc[:, None, None] * n + rs[:, None, None] * perp[None]
        F = f(x).sum(axis=-1) * (2.0 * np.pi / quad.azimuth)
        out[a] = np.sum(wt * sh * F)
    return out


def gelfand_graev(f: HyperFunction, k: ConeVector, quad: QuadratureSpec = QuadratureSpec()) -> complex:
    """``h(k) = int Dx f(x) delta(x.k - 1)`` on the past cone (``sigma = -1``)."""
    if k.sigma != -1:
        raise ValueError("the surface x.k = 1 is empty on the future cone")
    R = quad.radius_for(f)
    s0 = -math.log(k.omega)
    if abs(s0) >= math.asinh(R):
        warnings.warn(f"x.k = 1 misses the support (omega={k.omega:g})", TruncationWarning)
        return 0j
    return complex(math.exp(s0) * _gg_profile(f, k.n, np.array([s0]), quad, R)[0])


def gg_cone_function(f: HyperFunction, quad: QuadratureSpec = QuadratureSpec()) -> ConeFunction:
    """``h`` as a :class:`ConeFunction` (support in ``|log omega| < asinh R``)."""
    R = quad.radius_for(f)
    T = math.asinh(R)

    def fn(omega, n):
        s0 = -np.log(np.atleast_1d(np.asarray(omega, dtype=float)))
        vals = np.exp(s0) * _gg_profile(f, n, s0, quad, R)
        return vals if np.ndim(omega) else complex(vals[0])

    cf = ConeFunction(fn, (-T, T), f"gg[{f.name}]")
    object.__setattr__(cf, "source", (f, quad))
    return cf


def mellin(hfun: ConeFunction, n, rho, order: int = 128) -> np.ndarray | complex:
    """``int_0^inf domega h(omega (n,-1)) omega^{-i rho}`` with ``omega = e^u``.

    ``u`` runs over ``hfun.log_support`` with Gauss-Legendre nodes.
    """
    lo, hi = hfun.log_support
    u, w = gauss_legendre(order, lo, hi)
    h = np.asarray(hfun(np.exp(u), n), dtype=complex)
    rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
    vals = (w * np.exp(u) * h) @ np.exp(-1j * np.outer(u, rho_arr))
    return vals if np.ndim(rho) else complex(vals[0])


def mellin_inverse_at_one(hfun: ConeFunction, n, rho_max: float = 60.0, count: int = 1201, order: int = 256) -> complex:
    """``(1/2 pi) int drho Mellin(rho)``, which should return ``h`` at ``omega = 1``."""
    rho = np.linspace(-rho_max, rho_max, count)
    w = np.full(count, rho[1] - rho[0])
    w[[0, -1]] *= 0.5
    return complex(np.sum(w * mellin(hfun, n, rho, order)) / (2.0 * np.pi))


def mellin_of_gg(f: HyperFunction, nodes, rho, quad: QuadratureSpec = QuadratureSpec(), order: int = 96) -> np.ndarray:
    """``phi`` obtained as the Mellin transform of the Gelfand-Graev transform."""
    R = quad.radius_for(f)
    T = math.asinh(R)
    s0, ws = gauss_legendre(order, -T, T)
    E = np.exp(1j * np.outer(s0, np.asarray(rho, dtype=float)))
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    out = np.empty((nodes.shape[0], E.shape[1]), dtype=complex)
    for j, n in enumerate(nodes):
        out[j] = (ws * _gg_profile(f, n, s0, quad, R)) @ E
    return out


def spectral_from_gg(hfun: ConeFunction, quad: QuadratureSpec = QuadratureSpec(), order: int = 96,
                     source_real: bool = False) -> SpectralFunction:
    """Sample ``phi = Mellin(h)`` on the rule and rho grid of ``quad``."""
    rule = quad.sphere()
    rho, _ = quad.rho_grid()
    lo, hi = hfun.log_support
    u, w = gauss_legendre(order, lo, hi)
    E = np.exp(-1j * np.outer(u, rho))
    vals = np.empty((rule.size, rho.shape[0]), dtype=complex)
    for j, n in enumerate(rule.nodes):
        h = np.asarray(hfun(np.exp(u), n), dtype=complex)
        vals[j] = (w * np.exp(u) * h) @ E
    return SpectralFunction(rule.rule_id, rule.nodes, rule.weights, rho, vals, source_real=source_real)


def double_inverse_gg(hfun: ConeFunction, x, quad: QuadratureSpec = QuadratureSpec(), order: int = 96,
                      source_real: bool = False) -> np.ndarray:
    """Invert the Gelfand-Graev transform at chart points ``x``.

    The ``delta''`` kernel is never discretised: after the two integrations
    by parts in the auxiliary scale variable and the scaling of ``k``, the
    inverse is the rho/n integral of ``rho^2 Mellin(h)(n, rho) q^{-1 - i rho}``.
    """
    phi = spectral_from_gg(hfun, quad, order, source_real)
    return inverse_transform(phi, x)


def consistency_triangle(f: HyperFunction, quad: QuadratureSpec = QuadratureSpec(),
                         nodes=None, rho=None) -> float:
    """``max |Mellin(GG f) - forward(f)| / max |forward(f)|``."""
    if nodes is None:
        nodes = quad.sphere().nodes[::29]
    if rho is None:
        rho = np.linspace(-12.0, 12.0, 25)
    direct = forward_transform(f, quad, nodes=nodes, rho=rho).values
    via_gg = mellin_of_gg(f, nodes, rho, quad)
    return float(np.max(np.abs(direct - via_gg)) / np.max(np.abs(direct)))
