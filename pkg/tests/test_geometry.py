import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypersga.geometry import (
    ConeVector, DomainError, HyperPoint, lift, lower, measure_weight_H3, mink_dot,
    pairing, sample_cone_vectors, sample_hyper_points, sample_spatial,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(st.lists(finite, min_size=4, max_size=4))
def test_lower_twice_is_bit_exact(v):
    assert np.array_equal(lower(lower(v)), np.asarray(v, float))


def test_lift_lies_on_upper_sheet():
    for p in sample_hyper_points(100, 3):
        assert abs(mink_dot(p.ambient, p.ambient) + 1.0) < 1e-12 * p.x4**2
        assert p.x4 >= 1.0


def test_apex():
    p = lift([0.0, 0.0, 0.0])
    assert p.x4 == 1.0
    assert measure_weight_H3(p) == 1.0


@pytest.mark.parametrize("bad", [[1.0, 2.0], [np.nan, 0.0, 0.0], [np.inf, 0, 0]])
def test_lift_rejects_bad_input(bad):
    with pytest.raises(DomainError):
        lift(bad)


def test_cone_vectors_are_null():
    for k in sample_cone_vectors(50, 1, sigma=None):
        c = k.components
        assert abs(mink_dot(c, c)) < 1e-12 * k.omega**2


def test_cone_vector_validation():
    with pytest.raises(DomainError):
        ConeVector(-1.0, (0.0, 0.0, 1.0))
    with pytest.raises(DomainError):
        ConeVector(1.0, (0.0, 0.0, 2.0))
    with pytest.raises(DomainError):
        ConeVector(1.0, (0.0, 0.0, 1.0), sigma=0)


def test_pairing_sign_is_minus_sigma():
    pts = sample_hyper_points(30, 5)
    for k in sample_cone_vectors(30, 6, sigma=None):
        for p in pts:
            assert math.copysign(1.0, pairing(p, k)) == -k.sigma


def test_pairing_matches_minkowski_product():
    p = HyperPoint(0.3, -1.2, 0.5)
    k = ConeVector.from_direction([1.0, 2.0, -2.0], 1.7)
    assert pairing(p, k) == pytest.approx(mink_dot(p.ambient, k.components), rel=1e-14)


def test_flipped_is_negative():
    k = ConeVector.from_direction([0.2, 0.3, 0.9], 2.0)
    assert np.allclose(k.flipped().components, -k.components, atol=0)


def test_sampling_is_reproducible():
    assert np.array_equal(sample_spatial(10, 42), sample_spatial(10, 42))
    assert not np.array_equal(sample_spatial(10, 42), sample_spatial(10, 43))
    with pytest.raises(DomainError):
        sample_spatial(0, 1)
