"""Complex log-gamma and the two ladder coefficient functions.

``g_of_h`` solves ``g(h) g(h + i) = 2h + i`` and ``ladder_coefficient``
solves the cocycle ``g(u, rho) g(v, rho - u) = g(u + v, rho)`` with the
boundary values ``g(0, rho) = 1`` and ``g(i, rho) = 2 sqrt(rho (rho - i))``.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.special import loggamma

from .quadrature import QuadratureError, tanh_sinh_panels

POLE_TOL = 1e-12
NEAR_POLE = 1e-6


class PoleError(ValueError):
    """Argument at (or numerically at) a pole of a gamma factor."""


class NearPoleError(PoleError):
    """Argument closer than the safety margin to a branch point or pole."""


def _check_gamma_arg(z: complex):
    if abs(z.imag) < POLE_TOL and z.real <= 0 and abs(z.real - round(z.real)) < POLE_TOL:
        raise PoleError(f"gamma pole at {z}")


def log_gamma(z) -> complex:
    """Principal branch of ``log Gamma(z)`` (cut along the negative real axis)."""
    z = complex(z)
    _check_gamma_arg(z)
    return complex(loggamma(z))


def gamma(z) -> complex:
    return cmath.exp(log_gamma(z))


# -- g(h) ---------------------------------------------------------------------------

def _log_G(z):
    """log of ``Gamma(a+3/4) Gamma(b+3/4) / (Gamma(a+1/4) Gamma(b+1/4))``, a = iz/2 = -b."""
    a = 0.5j * np.asarray(z, dtype=complex)
    return loggamma(a + 0.75) + loggamma(-a + 0.75) - loggamma(a + 0.25) - loggamma(-a + 0.25)


def _singular_h(z: complex) -> bool:
    # poles/zeros of the gamma ratio sit on the imaginary axis at +-i(k + 1/2)
    if abs(z.real) > POLE_TOL:
        return False
    y = abs(z.imag) - 0.5
    return y > -POLE_TOL and abs(y - round(y)) < POLE_TOL


def g_of_h(z) -> complex:
    """``2 [Gamma(iz/2+3/4) Gamma(-iz/2+3/4) / (Gamma(iz/2+1/4) Gamma(-iz/2+1/4))]^(1/2)``.

    On the real axis this is the positive root.  Off the axis the root is
    continued from the real axis along a path passing to the right of the
    branch points ``+-i/2, +-5i/2, ...`` (vertical at ``Re = |Re z| + 1``,
    then horizontal), which is the branch that keeps
    ``g(h) g(h + i) = 2h + i`` valid for negative ``h`` as well.
    """
    z = complex(z)
    if _singular_h(z):
        raise PoleError(f"g(h) is singular at h = {z}")
    if z.imag == 0.0:
        return complex(2.0 * math.exp(0.5 * float(_log_G(z).real)), 0.0)
    x0 = abs(z.real) + 1.0
    # distance from the horizontal leg to the nearest singular point
    y = abs(z.imag)
    k = np.arange(0, int(y) + 3)
    sing = np.concatenate([k + 0.5])
    gap = max(float(np.min(np.abs(sing - y))), 1e-3)
    step = min(0.02, gap / 8.0)
    n_up = max(2, math.ceil(abs(z.imag) / 0.02))
    n_left = max(2, math.ceil((x0 - z.real) / step))
    up = x0 + 1j * np.linspace(0.0, z.imag, n_up + 1)
    left = np.linspace(x0, z.real, n_left + 1)[1:] + 1j * z.imag
    path = np.concatenate([up, left])
    lg = _log_G(path)
    phase = np.unwrap(lg.imag)
    phase -= 2 * np.pi * round(phase[0] / (2 * np.pi))
    return complex(2.0 * np.exp(0.5 * (lg.real[-1] + 1j * phase[-1])))


def g_of_h_principal(z) -> complex:
    """Same ratio with the principal square root taken pointwise (for comparison)."""
    return complex(2.0 * np.sqrt(np.exp(_log_G(complex(z)))))


# -- g(u, rho) ------------------------------------------------------------------------

#: prefactor candidates ``K^{-iu} i^{-2iu}``; only K = 4 meets g(i, rho) = 2 sqrt(rho(rho-i))
PREFACTOR_BASE_PRINTED = 2.0
PREFACTOR_BASE = 4.0


def ladder_coefficient_squared(u, rho: float, base: float = PREFACTOR_BASE) -> complex:
    """``base^{-iu} i^{-2iu} Gamma(-i rho) Gamma(1-i rho) / (Gamma(-i(rho-u)) Gamma(1-i(rho-u)))``.

    ``i^{-2iu}`` uses the principal ``log i = i pi / 2``, i.e. equals ``exp(pi u)``.
    """
    u = complex(u)
    s = rho - u
    lg = (
        log_gamma(-1j * rho) + log_gamma(1 - 1j * rho)
        - log_gamma(-1j * s) - log_gamma(1 - 1j * s)
    )
    return cmath.exp(-1j * u * math.log(base) + math.pi * u + lg)


def ladder_coefficient(u, rho: float) -> complex:
    """Coefficient ``g(u, rho)`` of the complex-power ladder ``rho -> rho - u``.

    Written as ``2^{-iu} e^{pi u / 2} Gamma(1 - i rho) / Gamma(1 - i(rho - u))
    * sqrt(rho - u) / sqrt(rho)`` with principal roots.  Its square is
    :func:`ladder_coefficient_squared`, the square roots cancel pairwise in
    the cocycle, ``g(0, rho) = 1`` exactly, and the value is continuous along
    real ``u`` (it passes through zero at ``u = rho``).
    """
    rho = float(rho)
    if abs(rho) < NEAR_POLE:
        raise NearPoleError(f"rho = {rho} is at the branch point 0")
    if isinstance(u, complex) and u.imag != 0.0:
        s = complex(rho - u)
    else:
        u = float(getattr(u, "real", u))
        s = complex(rho - u, 0.0)
    if abs(s) < NEAR_POLE:
        raise NearPoleError(f"rho - u = {s} is at the branch point 0")
    if u == 0:
        return 1.0 + 0.0j
    u = complex(u)
    log_ratio = log_gamma(1 - 1j * rho) - log_gamma(1 - 1j * s)
    pref = -1j * u * math.log(2.0) + 0.5 * math.pi * u
    return cmath.exp(pref + log_ratio) * cmath.sqrt(s) / cmath.sqrt(complex(rho, 0.0))


def sqrt_rho_shift(rho) -> complex:
    """Principal ``sqrt(rho (rho - i))``."""
    return cmath.sqrt(complex(rho) * (complex(rho) - 1j))


# -- scalar Mellin-Barnes power identity ------------------------------------------------

def mellin_barnes_power(u: float, mu: float, tol: float = 1e-13) -> complex:
    """``(1/Gamma(iu)) int_0^inf z^{-1+iu} e^{-mu z} dz`` for real ``u != 0``.

    For real ``u`` the integral converges only in the Abel sense at
    ``z -> 0``; it is evaluated as the continuation from ``Re(iu) > 0``:
    the ``z < 1`` part of ``z^{-1+iu}`` is integrated exactly
    (``1/(iu)``) and subtracted from the integrand.  With ``z = e^t`` both
    remaining pieces decay exponentially and are summed with tanh-sinh.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    if u == 0:
        raise ValueError("u must be non-zero")
    tiny = 1e-17
    t_lo = math.log(tiny / mu)
    t_hi = math.log(-math.log(tiny) / mu) + 1.0

    def low(t):
        return np.exp(1j * u * t) * np.expm1(-mu * np.exp(t))

    def high(t):
        return np.exp(1j * u * t - mu * np.exp(t))

    try:
        total = tanh_sinh_panels(low, t_lo, 0.0, tol=tol) + 1.0 / (1j * u)
        if t_hi > 0:
            total += tanh_sinh_panels(high, 0.0, t_hi, tol=tol)
    except QuadratureError as exc:
        exc.diagnostics.update({"u": u, "mu": mu})
        raise
    return total / gamma(1j * u)


def verify_mellin_barnes_power(u: float, mu: float) -> float:
    """``|integral - mu^{-iu}|``."""
    return abs(mellin_barnes_power(u, mu) - cmath.exp(-1j * u * math.log(mu)))


# -- suite ------------------------------------------------------------------------------

DEFAULT_TOLERANCES = {
    "g_functional": 1e-10,
    "cocycle": 1e-10,
    "boundary_zero": 0.0,
    "boundary_i": 1e-10,
    "mellin_barnes": 1e-6,
}


def cocycle_residuals(count: int = 1000, seed: int = 0, span: float = 5.0,
                      relative: bool = True) -> np.ndarray:
    """Cocycle defects ``|g(u,r) g(v,r-u) - g(u+v,r)|`` for uniform triples in ``[-span, span]^3``.

    ``relative=True`` divides by ``|g(u+v,r)|``.  The coefficients grow like
    ``exp(pi |u| / 2)``, so on wide ranges the absolute defect is dominated by
    double-precision rounding of large values.  Triples within 0.1 of a
    branch point are redrawn.
    """
    rng = np.random.default_rng([seed, 3])
    out = []
    while len(out) < count:
        rho, u, v = rng.uniform(-span, span, 3)
        if min(abs(rho), abs(rho - u), abs(rho - u - v)) <= 0.1:
            continue
        lhs = ladder_coefficient(u, rho) * ladder_coefficient(v, rho - u)
        rhs = ladder_coefficient(u + v, rho)
        out.append(abs(lhs - rhs) / (abs(rhs) if relative else 1.0))
    return np.array(out)


def verify_special(seed: int = 0, tolerances: dict | None = None):
    """Functional equations of both ``g`` functions and the scalar Mellin-Barnes identity."""
    from .reports import RelationRow, VerificationReport

    tol = dict(DEFAULT_TOLERANCES)
    for key, val in (tolerances or {}).items():
        if key not in tol:
            raise KeyError(f"unknown special-function tolerance {key!r}")
        tol[key] = float(val)
    hs = np.linspace(-10.0, 10.0, 201)
    fe = max(abs(g_of_h(h) * g_of_h(h + 1j) - (2 * h + 1j)) for h in hs)
    cyc = float(cocycle_residuals(1000, seed).max())
    cyc_abs = float(cocycle_residuals(1000, seed, relative=False).max())
    rhos = np.random.default_rng([seed, 4]).uniform(-5.0, 5.0, 50)
    rhos = rhos[np.abs(rhos) > 0.05]
    b0 = max(abs(ladder_coefficient(0.0, r) - 1.0) for r in rhos)
    bi = max(abs(ladder_coefficient(1j, r) - 2 * sqrt_rho_shift(r)) for r in rhos)
    mb = max(
        verify_mellin_barnes_power(u, mu)
        for u in (-3.0, -1.0, 0.5, 1.5, 4.0)
        for mu in (0.25, 0.7, 1.0, 2.5, 6.0)
    )

    def row(name, tag, res, **extra):
        return RelationRow(name, tag, float(res), tol[name], extra)

    rows = [
        row("g_functional", "Eq. (3.28)", fe, points=len(hs)),
        row("cocycle", "Eq. (3.68)", cyc, triples=1000, measure="relative", absolute=cyc_abs),
        row("boundary_zero", "Eq. (3.69)", b0),
        row("boundary_i", "Eq. (3.69)", bi),
        row("mellin_barnes", "Eq. (3.61)", mb, pairs=25),
    ]
    notes = {
        "prefactor_base_printed": PREFACTOR_BASE_PRINTED,
        "prefactor_base_used": PREFACTOR_BASE,
        "g_of_h_at_zero": g_of_h(0.0).real,
    }
    return VerificationReport("special", rows, seed, notes=notes)
