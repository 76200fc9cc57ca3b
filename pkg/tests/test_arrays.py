import numpy as np
import pytest
from numpy.testing import assert_allclose

from nfthin.arrays import (ArrayGeometry, FocusPoint, ThinningVector,
                           apply_thinning, steering_vector,
                           wavelength_from_carrier)
from nfthin.channel import make_rng

LAM = 0.01


def test_uniform_geometry_basics():
    g = ArrayGeometry.uniform(LAM, 8, LAM / 2)
    assert g.n_elements == 8
    assert_allclose(g.aperture_length, 7 * LAM / 2)
    assert g.positions[0] == 0.0
    assert np.all(np.diff(g.positions) > 0)


def test_positions_reanchored_to_zero():
    g = ArrayGeometry(LAM, np.array([3.0, 3.5, 4.25]))
    assert_allclose(g.positions, [0.0, 0.5, 1.25])


def test_geometry_validation():
    with pytest.raises(ValueError):
        ArrayGeometry(LAM, np.array([0.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        ArrayGeometry(-1.0, np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        ArrayGeometry.uniform(LAM, 1, LAM)


def test_rayleigh_distance_fig1_scale():
    # 256 elements at double-wavelength spacing, 15 GHz: about 10.3 km
    lam = wavelength_from_carrier(15e9)
    g = ArrayGeometry.uniform(lam, 256, 2 * lam)
    assert abs(g.rayleigh_distance - 10.3e3) / 10.3e3 < 0.03
    assert abs(g.rayleigh_distance / 30.0 - 346.0) < 1.0


def test_rayleigh_distance_benchmark_scale():
    lam = wavelength_from_carrier(30e9)
    g = ArrayGeometry.uniform(lam, 320, lam / 2)
    assert abs(g.min_valid_range - 3.18) < 0.01
    assert abs(g.rayleigh_distance / 7.0 - 72.6) < 0.1


def test_rayleigh_quadratic_in_aperture():
    g1 = ArrayGeometry.uniform(LAM, 11, LAM)
    g2 = ArrayGeometry.uniform(LAM, 21, LAM)  # doubled aperture
    assert_allclose(g2.rayleigh_distance, 4 * g1.rayleigh_distance)


def test_steering_first_entry_is_real():
    g = ArrayGeometry.uniform(LAM, 16, LAM / 2)
    a = steering_vector(g, FocusPoint(0.7, 25.0))
    assert_allclose(a[0], 1 / np.sqrt(16), rtol=1e-15)


def test_steering_endfire_two_elements():
    # hand evaluation of the exponent: second entry phase is exactly -pi
    g = ArrayGeometry.uniform(LAM, 2, LAM / 2)
    a = steering_vector(g, FocusPoint(np.pi / 2, 1e6))
    assert abs(abs(np.angle(a[1])) - np.pi) < 1e-6


def test_steering_far_field_limit():
    g = ArrayGeometry.uniform(LAM, 32, LAM / 2)
    a = steering_vector(g, FocusPoint(0.3, 1e12))
    ff = -g.wavenumber() * g.positions * np.sin(0.3)
    assert np.max(np.abs(np.angle(a * np.exp(-1j * ff)))) < 1e-6


def test_steering_unit_magnitude_entries():
    g = ArrayGeometry.uniform(LAM, 16, LAM / 2)
    for norm in (1, 16, 99):
        a = steering_vector(g, FocusPoint(-0.5, 7.0), norm)
        assert_allclose(np.abs(a) * np.sqrt(norm), 1.0, rtol=1e-14)


def test_steering_translation_invariance():
    # re-anchoring makes responses identical for shifted element layouts
    pos = np.array([0.0, 0.013, 0.029, 0.041])
    f = FocusPoint(0.4, 9.0)
    a = steering_vector(ArrayGeometry(LAM, pos), f)
    b = steering_vector(ArrayGeometry(LAM, pos + 1.7), f)
    assert np.max(np.abs(a - b)) < 1e-10
    gain_a = np.abs(np.vdot(a, steering_vector(ArrayGeometry(LAM, pos),
                                               FocusPoint(0.1, 12.0)))) ** 2
    gain_b = np.abs(np.vdot(b, steering_vector(ArrayGeometry(LAM, pos + 1.7),
                                               FocusPoint(0.1, 12.0)))) ** 2
    assert abs(gain_a - gain_b) <= 1e-10 * gain_a


def test_steering_rejects_bad_inputs():
    g = ArrayGeometry.uniform(LAM, 4, LAM / 2)
    with pytest.raises(ValueError):
        FocusPoint(0.0, 0.0)
    with pytest.raises(ValueError):
        FocusPoint(2.0, 1.0)
    with pytest.raises(ValueError):
        steering_vector(g, FocusPoint(0.0, 1.0), norm_count=0)


def test_thinning_vector_counts():
    tv = ThinningVector.from_active_indices(10, [0, 3, 9], fixed_set=[0, 9])
    assert tv.active_count() == 3
    assert tv.thinning_ratio() == 0.3
    assert list(tv.active_indices()) == [0, 3, 9]
    assert tv.to_bitstring() == "1001000001"
    back = ThinningVector.from_bitstring(tv.to_bitstring())
    assert np.array_equal(back.mask, tv.mask)


def test_thinning_vector_fixed_set_enforced():
    with pytest.raises(ValueError):
        ThinningVector(np.array([1, 0, 0, 1]), fixed_set=frozenset({1}))
    with pytest.raises(ValueError):
        ThinningVector(np.array([0, 2, 0]))


def test_apply_thinning_identity_and_support():
    rng = make_rng(3)
    v = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    full = ThinningVector.full(12)
    assert_allclose(apply_thinning(v, full), v)
    tv = ThinningVector.from_active_indices(12, [0, 5, 11])
    out = apply_thinning(v, tv)
    assert np.all(out[tv.mask == 0] == 0)
    assert_allclose(out[tv.mask == 1], v[tv.mask == 1])
    with pytest.raises(ValueError):
        apply_thinning(v[:5], tv)
