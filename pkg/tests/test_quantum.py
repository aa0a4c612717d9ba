import cmath
import math

import numpy as np
import pytest

from hypersga import quantum as Q
from hypersga.geometry import ConeVector, DomainError, sample_spatial
from hypersga.special import NearPoleError


K = ConeVector.from_direction([0.3, -0.5, 0.8], 1.4)
POINTS = list(sample_spatial(8, 21, 1.2))


def gauss():
    return Q.gaussian_wave((0.2, -0.1, 0.3), 1.1, (0.4, -0.2, 0.1))


def _plain_gauss(x):
    d = x - np.array([0.2, -0.1, 0.3])
    return np.exp(-(d @ d) / (2 * 1.1**2) + 1j * (x @ np.array([0.4, -0.2, 0.1])))


def _fd_grad_hess(f, x, h=1e-4):
    n = 3
    g = np.zeros(n, complex)
    H = np.zeros((n, n), complex)
    E = np.eye(n) * h
    for a in range(n):
        g[a] = (f(x + E[a]) - f(x - E[a])) / (2 * h)
        for b in range(n):
            H[a, b] = (f(x + E[a] + E[b]) - f(x + E[a] - E[b]) - f(x - E[a] + E[b]) + f(x - E[a] - E[b])) / (4 * h * h)
    return g, H


def test_hamiltonian_against_finite_differences():
    H = Q.apply(Q.hamiltonian(), gauss())
    for x in POINTS[:4]:
        g, Hs = _fd_grad_hess(_plain_gauss, x)
        ref = -np.sum((np.eye(3) + np.outer(x, x)) * Hs) - 3.0 * (x @ g)
        assert H(x) == pytest.approx(ref, rel=1e-6, abs=1e-7)


def test_divergence_and_expanded_forms_agree():
    psi = gauss()
    a = Q.apply(Q.hamiltonian(), psi)
    b = Q.apply(Q.hamiltonian_expanded(), psi)
    for x in POINTS:
        assert abs(a(x) - b(x)) < 1e-12 * (1 + abs(a(x)))


def test_momentum_closed_form():
    # P_a psi = -i d_a psi + i x_a psi / (2 (1 + x^2))
    for alpha in (1, 2, 3):
        P = Q.apply(Q.momentum(alpha), gauss())
        for x in POINTS[:3]:
            g, _ = _fd_grad_hess(_plain_gauss, x, 1e-5)
            ref = -1j * g[alpha - 1] + 1j * x[alpha - 1] * _plain_gauss(x) / (2 * (1 + x @ x))
            assert P(x) == pytest.approx(ref, rel=1e-7, abs=1e-9)


@pytest.mark.parametrize("rho", [-4.2, -0.5, 0.0, 1.3, 5.0])
def test_plane_wave_eigenvalue(rho):
    psi = Q.plane_wave(Q.PlaneWaveLabel(K, rho))
    Hpsi = Q.apply(Q.hamiltonian(), psi)
    for x in POINTS:
        assert abs(Hpsi(x) - (1 + rho**2) * psi(x)) < 1e-8 * abs(psi(x))


def test_future_cone_label_uses_same_wave():
    a = Q.plane_wave(Q.PlaneWaveLabel(K, 0.7))
    b = Q.plane_wave(Q.PlaneWaveLabel(K.flipped(), 0.7))
    for x in POINTS[:3]:
        assert a(x) == pytest.approx(b(x), rel=1e-14)


def test_eigenvalue_batch():
    assert Q.eigenvalue_residuals(50, seed=9).max() < 1e-8


def test_casimir_identity_needs_symmetric_boost():
    psi = gauss()
    H = Q.apply(Q.hamiltonian(), psi)
    sym = Q.apply(Q.casimir_hamiltonian("symmetric"), psi)
    printed = Q.apply(Q.casimir_hamiltonian("printed"), psi)
    for x in POINTS[:3]:
        assert abs(H(x) - sym(x)) < 1e-10 * (1 + abs(H(x)))
    assert max(abs(H(x) - printed(x)) for x in POINTS[:3]) > 1e-3
    with pytest.raises(ValueError):
        Q.angular(1, 4, "other")


@pytest.mark.parametrize("m2", [0.0, 1.0, -1.0])
@pytest.mark.parametrize("rho", [-2.0, 0.5, 3.0])
def test_radial_ode(rho, m2):
    fs = np.linspace(1.5, 9.0, 16)
    for c1, c2 in ((1.0, 0.0), (0.0, 1.0), (0.3, 0.8j)):
        assert Q.verify_radial_ode(rho, m2, fs, c1, c2) < 1e-9


def test_radial_ode_singular_point():
    with pytest.raises(DomainError):
        Q.verify_radial_ode(1.0, 1.0, [1.0])


@pytest.mark.parametrize("rho", [-3.0, -0.5, 0.8, 2.4])
def test_ladder_T(rho):
    res = Q.ladder_action_T(Q.PlaneWaveLabel(K, rho))
    target = -(2 * rho - 1j)
    assert abs(res.coefficient - target) < 1e-8 * abs(target)
    assert res.shifted_label.rho == pytest.approx(rho - 1j)


@pytest.mark.parametrize("rho", [-3.0, -0.5, 0.8, 2.4])
def test_ladder_A(rho):
    lab = Q.PlaneWaveLabel(K, rho)
    assert abs(Q.ladder_action_KLA(lab, "A-").coefficient) < 1e-8
    ap = Q.ladder_action_KLA(lab, "A+").coefficient
    target = 2 * cmath.sqrt(rho * (rho - 1j))
    assert abs(ap - target) < 1e-8 * abs(target)
    assert Q.ladder_action_KLA(lab, "K").coefficient == pytest.approx(cmath.sqrt(rho - 1j) * cmath.sqrt(rho))


def test_ladder_errors():
    lab = Q.PlaneWaveLabel(K, 1.0)
    with pytest.raises(ValueError):
        Q.ladder_action_KLA(lab, "B")
    with pytest.raises(NearPoleError):
        Q.ladder_action_KLA(Q.PlaneWaveLabel(K, 0.0), "A+")
    with pytest.raises(Q.MismatchError):
        Q.ladder_action_T(lab, tol=-1.0)


def test_power_ladder_boundary_and_composition():
    lab = Q.PlaneWaveLabel(K, 1.7)
    assert Q.power_ladder(lab, 0.0).coefficient == 1.0
    assert Q.power_ladder(lab, 1j).coefficient == pytest.approx(2 * cmath.sqrt(1.7 * (1.7 - 1j)), rel=1e-12)
    a = Q.power_ladder(lab, 0.4)
    b = Q.power_ladder(a.shifted_label, 0.9)
    c = Q.power_ladder(lab, 1.3)
    assert c.shifted_label.rho == pytest.approx(0.4)
    assert a.coefficient * b.coefficient == pytest.approx(c.coefficient, rel=1e-12)


def test_spectral_operator_needs_label():
    with pytest.raises(Q.LabelRequiredError):
        Q.apply(Q.h_operator(), gauss())(POINTS[0])
    lab = Q.PlaneWaveLabel(K, 0.6)
    psi = Q.plane_wave(lab)
    assert Q.apply(Q.h_operator(), psi)(POINTS[0]) == pytest.approx(0.6 * psi(POINTS[0]))


def test_order_limit():
    psi = gauss()
    with pytest.raises(Q.OrderError):
        psi.jet(POINTS[0], 3)
    d3 = Q.Derivative(Q.Derivative(Q.Derivative(psi, 0), 1), 2)
    with pytest.raises(Q.OrderError):
        d3(POINTS[0])


def test_commutators():
    g = gauss()
    assert Q.commutator_residual(Q.angular(1, 2), Q.angular(2, 3), [(-1j, Q.angular(1, 3))], g, POINTS[:3]) < 1e-8
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            exp = [(-1j if a == b else 0.0, Q.identity())]
            assert Q.commutator_residual(Q.momentum(a), Q.position(b), exp, g, POINTS[:3]) < 1e-10


def test_hermiticity():
    phi = Q.gaussian_wave((0.2, 0.0, -0.3), 1.0, (0.5, 0.0, 0.2))
    psi = Q.gaussian_wave((-0.1, 0.4, 0.0), 0.9, (-0.2, 0.3, 0.0))
    for a in (1, 2, 3):
        assert Q.hermiticity_residual(Q.momentum(a), phi, psi) < 1e-6
    assert Q.hermiticity_residual(Q.hamiltonian(), phi, psi) < 1e-5
    # the momentum without the conformal factors is not symmetric for d^3x / x4
    plain = Q.OperatorHandle("-i d1", lambda w: Q.Combination(((-1j, Q.Derivative(w, 0)),)))
    assert Q.hermiticity_residual(plain, phi, psi) > 1e-3


def test_verify_quantum_restricted_grid():
    rep = Q.verify_quantum(seed=1, rho_grid=(-3.0, 0.5))
    assert rep.passed
    rec = rep.notes["prefactor_resolution"]
    assert rec["corrected"]["max_abs_dev_of_square"] < 1e-10
    assert rec["printed"]["max_abs_dev_of_square"] > 1.0
    with pytest.raises(KeyError):
        Q.verify_quantum(tolerances={"nope": 1.0})
