import numpy as np
import pytest
from numpy.testing import assert_allclose

from nfthin.arrays import ArrayGeometry, ThinningVector
from nfthin.channel import (RangeValidityWarning, UserLocation, channel_matrix,
                            channel_vector, default_range_interval, make_rng,
                            pathloss, sample_scenario, scenario_from_csv,
                            scenario_to_csv, trial_seed)

LAM = 0.01


def test_pathloss_hand_value():
    # 0.01^2 / ((4 pi)^2 * 100)
    assert_allclose(pathloss(0.01, 10.0), 6.3325739776461107e-09, rtol=1e-12)


def test_pathloss_scalings():
    assert_allclose(pathloss(LAM, 20.0), pathloss(LAM, 10.0) / 4, rtol=1e-14)
    assert_allclose(pathloss(2 * LAM, 10.0), 4 * pathloss(LAM, 10.0), rtol=1e-14)
    with pytest.raises(ValueError):
        pathloss(LAM, 0.0)


def test_channel_norm_identity_full_and_thinned():
    g = ArrayGeometry.uniform(LAM, 40, LAM / 2)
    u = UserLocation(0.3, 8.0)
    beta = pathloss(LAM, u.range_m)
    h_full = channel_vector(g, ThinningVector.full(40), u)
    assert_allclose(np.linalg.norm(h_full) ** 2, beta, rtol=1e-12)
    rng = make_rng(8)
    for _ in range(5):
        nt = int(rng.integers(1, 41))
        tv = ThinningVector.from_active_indices(40, rng.choice(40, nt, replace=False))
        h = channel_vector(g, tv, u)
        assert_allclose(np.linalg.norm(h) ** 2, beta * nt / 40, rtol=1e-12)


def test_channel_columns_identical_for_colocated_users():
    g = ArrayGeometry.uniform(LAM, 16, LAM / 2)
    u = UserLocation(-0.2, 5.0)
    H = channel_matrix(g, ThinningVector.full(16), [u, u])
    assert_allclose(H.entries[:, 0], H.entries[:, 1])


def test_channel_validity_strict_and_lenient():
    g = ArrayGeometry.uniform(LAM, 100, LAM / 2)  # 2D ~ 0.99 m
    u = UserLocation(0.0, 0.5)
    with pytest.raises(ValueError):
        channel_vector(g, ThinningVector.full(100), u)
    with pytest.warns(RangeValidityWarning):
        channel_vector(g, ThinningVector.full(100), u, strict=False)


def test_sample_scenario_bounds_and_determinism():
    g = ArrayGeometry.uniform(wavelength := 299792458.0 / 30e9, 320, wavelength / 2)
    r_int = default_range_interval(g)
    a_int = (-np.pi / 3, np.pi / 3)
    sc = sample_scenario(16, r_int, a_int, seed=42)
    assert sc.k == 16
    assert np.all(sc.ranges() >= r_int[0]) and np.all(sc.ranges() <= r_int[1])
    assert np.all(np.abs(sc.angles()) <= np.pi / 3)
    again = sample_scenario(16, r_int, a_int, seed=42)
    assert np.array_equal(sc.ranges(), again.ranges())
    assert np.array_equal(sc.angles(), again.angles())
    other = sample_scenario(16, r_int, a_int, seed=43)
    assert not np.array_equal(sc.ranges(), other.ranges())


def test_sample_scenario_degenerate_interval():
    sc = sample_scenario(1, (5.0, 5.0), (0.1, 0.1), seed=0)
    assert sc.users[0].range_m == 5.0
    assert sc.users[0].angle == 0.1


def test_sample_scenario_rejects_empty_interval():
    with pytest.raises(ValueError):
        sample_scenario(4, (10.0, 5.0), (0.0, 1.0), seed=0)
    with pytest.raises(ValueError):
        sample_scenario(0, (1.0, 2.0), (0.0, 1.0), seed=0)


def test_trial_seed_is_stable_and_distinct():
    a = trial_seed(123, 1, 5)
    assert a == trial_seed(123, 1, 5)
    assert a != trial_seed(123, 1, 6)
    assert a != trial_seed(124, 1, 5)


def test_scenario_csv_roundtrip_exact(tmp_path):
    sc = sample_scenario(16, (3.2, 72.6), (-np.pi / 3, np.pi / 3), seed=7)
    path = tmp_path / "scenario.csv"
    scenario_to_csv(sc, path)
    back = scenario_from_csv(path, seed=7)
    for a, b in zip(sc.users, back.users):
        assert a.angle == b.angle
        assert a.range_m == b.range_m
