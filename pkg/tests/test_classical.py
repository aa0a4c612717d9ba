import math

import numpy as np
import pytest

from hypersga import classical as C
from hypersga.geometry import DomainError, mink_dot


@pytest.fixture(scope="module")
def points():
    return C.sample_phase_points(12, seed=11)


def apex(momentum=(1.0, 2.0, 0.0)):
    return C.constrained_point([0.0, 0.0, 0.0], momentum)


def test_sampled_points_satisfy_constraints(points):
    for pt in points:
        g, p = pt.constraint_residuals()
        x4 = pt.x[3]
        assert abs(g) < 1e-12 * x4**2
        assert abs(p) < 1e-12 * x4 * np.abs(pt.p).max()
        assert -C.CASIMIR.value(pt) > C.MIN_MINUS_C


def test_canonical_pairs(points):
    pt = points[0]
    assert C.canonical_poisson(C.x_up(1), C.p_low(1), pt) == 1.0
    assert C.canonical_poisson(C.x_up(1), C.x_up(2), pt) == 0.0
    assert C.canonical_poisson(C.p_low(2), C.x_up(2), pt) == -1.0


def test_canonical_angular_momentum_bracket(points):
    # hand computation: {x1 p2 - x2 p1, x2 p3 - x3 p2} = x3 p1 - x1 p3 = -J13
    for pt in points[:4]:
        assert C.canonical_poisson(C.J(1, 2), C.J(2, 3), pt) == pytest.approx(-C.J(1, 3).value(pt), abs=1e-12)


def test_gradient_matches_central_differences(points):
    pt = points[1]
    z = pt.z
    h = 1e-6
    for obs in (C.J(1, 4), C.CASIMIR, C.SQRT_MINUS_C, C.realize_generator(3, 6)):
        g = obs.gradient(pt)
        fd = np.array([(obs.fn(list(z + h * e)) - obs.fn(list(z - h * e))) / (2 * h) for e in np.eye(8)])
        assert np.allclose(g, fd, rtol=1e-5, atol=1e-6 * np.abs(g).max())


def test_dirac_coordinate_brackets(points):
    for pt in points[:4]:
        assert abs(C.dirac_bracket(C.x_up(1), C.x_up(2), pt)) < 1e-12
        assert C.dirac_bracket(C.p_low(1), C.p_low(2), pt) == pytest.approx(C.J(1, 2).value(pt), abs=1e-10)


def test_dirac_closed_form_sign(points):
    forms = C.dirac_closed_forms(points[2])
    assert forms["{x^i,p_j}=delta+x^i x_j"] < 1e-12
    assert forms["{x^i,p_j}=delta-x^i x_j"] > 1e-3
    assert forms["{p_i,p_j}=J_ij"] < 1e-12


def test_apex_projector():
    pt = C.PhasePoint((0.0, 0.0, 0.0, 1.0), (0.0, 0.0, 0.0, 0.0))
    # engine orientation {x, p} = +delta; the relation tables use the opposite sign
    assert C.dirac_bracket(C.p_low(1), C.x_up(1), pt) == -1.0
    assert C.PRINTED_SIGN * C.dirac_bracket(C.p_low(1), C.x_up(1), pt) == 1.0


def test_generic_and_jet_brackets_agree(points):
    pt = points[3]
    f, g = C.realize_generator(1, 5), C.realize_generator(2, 6)
    j = C.dirac_bracket_jet(f, g, pt)
    assert j.val == pytest.approx(C.dirac_bracket(f, g, pt), rel=1e-12, abs=1e-12)
    h = 1e-6
    z = pt.z
    G, pi = C.dirac_gradient_matrix([f, g], pt)
    assert j.val == pytest.approx(G[0] @ pi @ G[1], rel=1e-12, abs=1e-12)
    # gradient of the bracket against differences of the generic bracket (off-surface)
    for i in (0, 3, 5):
        e = np.zeros(8)
        e[i] = h
        up = C.PhasePoint(tuple((z + e)[:4]), tuple((z + e)[4:]))
        dn = C.PhasePoint(tuple((z - e)[:4]), tuple((z - e)[4:]))
        fd = (C.dirac_bracket(f, g, up) - C.dirac_bracket(f, g, dn)) / (2 * h)
        assert j.grad[i] == pytest.approx(fd, rel=1e-5, abs=1e-5)


def test_generator_examples():
    pt = apex()
    sq = math.sqrt(-C.CASIMIR.value(pt))
    assert C.realize_generator(5, 6).value(pt) == pytest.approx(sq) and sq > 0
    assert C.realize_generator(5, 4).value(pt) == pytest.approx(-sq)
    assert C.realize_generator(6, 4).value(pt) == 0.0
    assert C.realize_generator(4, 5).value(pt) == pytest.approx(sq)
    with pytest.raises(ValueError):
        C.realize_generator(0, 3)


def test_degenerate_momentum_is_rejected():
    pt = C.PhasePoint((0.0, 0.0, 0.0, 1.0), (0.0, 0.0, 0.0, 0.0))
    with pytest.raises(DomainError):
        C.SQRT_MINUS_C.value(pt)


def test_singular_constraint_matrix():
    pt = C.PhasePoint((1.0, 0.0, 0.0, 1.0), (0.0, 1.0, 0.0, 0.0))
    assert mink_dot(pt.x, pt.x) == 0.0
    with pytest.raises(C.SingularConstraintError):
        C.dirac_tensor(pt)
    with pytest.raises(C.SingularConstraintError):
        C.dirac_bracket(C.x_up(1), C.p_low(1), pt)


def test_structure_table(points):
    for pt in points:
        assert C.structure_residuals(pt).max() < 1e-8
    assert C.check_structure_relations(points[0]).passed


def test_structure_named_pairs(points):
    pt = points[4]
    m = C.realize_generator
    assert C.PRINTED_SIGN * C.dirac_bracket(m(5, 6), m(5, 1), pt) == pytest.approx(m(6, 1).value(pt), abs=1e-9)
    assert abs(C.dirac_bracket(m(1, 2), m(3, 4), pt)) < 1e-9


def test_printed_table_is_not_antisymmetric():
    m = np.arange(36.0).reshape(6, 6)
    m = m - m.T
    assert C.structure_rhs_as_printed(m, 0, 1, 1, 2) + C.structure_rhs_as_printed(m, 1, 2, 0, 1) != 0.0
    assert C.structure_rhs(m, 0, 1, 1, 2) + C.structure_rhs(m, 1, 2, 0, 1) == 0.0


def test_restrictive_relations(points):
    for pt in points:
        T, R, ct = C.restrictive_values(pt)
        scale = max(1.0, -C.CASIMIR.value(pt))
        assert np.abs(T).max() < 1e-9 * scale
        assert np.abs(R).max() < 1e-9 * scale
        assert abs(ct) < 1e-10 * scale
        assert abs(T[4, 5]) < 1e-9 * scale and abs(R[4, 5]) < 1e-9 * scale


def test_sqrtc_identities(points):
    for pt in points[:5]:
        res = C.sqrtc_residuals(pt)
        assert set(res) == {f"Eq. (2.{k})" for k in range(8, 14)}
        assert max(res.values()) < 1e-8


def test_first_class_antisymmetry_jacobi(points):
    gens = C.generators()
    ids = C.GENERATOR_IDS
    rng = np.random.default_rng(0)
    for pt in points[:5]:
        assert C.constraint_bracket_residual(pt) < 1e-9
        assert C.antisymmetry_residual(pt) < 1e-9
        for _ in range(5):
            a, b, c = rng.choice(len(ids), 3, replace=False)
            assert C.jacobi_residual(gens[ids[a]], gens[ids[b]], gens[ids[c]], pt) < 1e-7


def test_casimir_equals_twice_chart_hamiltonian(points):
    for pt in points:
        assert -C.CASIMIR.value(pt) == pytest.approx(2.0 * C.hamiltonian_chart(pt), rel=1e-12)


def test_verify_classical_small_run_is_deterministic():
    a = C.verify_classical(seed=5, points=10, ladder_points=5, jacobi_points=3, jacobi_triples=3)
    b = C.verify_classical(seed=5, points=10, ladder_points=5, jacobi_points=3, jacobi_triples=3)
    assert a.passed
    assert a.to_json(include_time=False) == b.to_json(include_time=False)
    with pytest.raises(KeyError):
        C.verify_classical(points=2, tolerances={"nope": 1.0})


def test_tight_tolerance_fails():
    rep = C.verify_classical(seed=1, points=3, ladder_points=1, jacobi_points=1, jacobi_triples=1,
                             tolerances={"structure": 1e-30})
    assert not rep.passed
