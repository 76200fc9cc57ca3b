import numpy as np
import pytest
from numpy.testing import assert_allclose

from nfthin.arrays import ThinningVector, wavelength_from_carrier
from nfthin.channel import Scenario, UserLocation, sample_scenario
from nfthin.experiments import BenchmarkConfig, build_schemes, compute_static_masks
from nfthin.precoding import PowerConfig
from nfthin.pso import SwarmConfig, optimize_sta
from nfthin.schemes import (make_fula, make_hula, make_pta, make_sula,
                            make_sta_scheme)

LAM30 = wavelength_from_carrier(30e9)


def small_cfg(**kw):
    defaults = dict(n_trials=4, n_particles=8, n_iterations=10, pta_ensemble=4,
                    master_seed=5)
    defaults.update(kw)
    return BenchmarkConfig(**defaults)


def test_fula_aperture_and_mask():
    setup = make_fula(LAM30, 320)
    assert_allclose(setup.geometry.aperture_length, 319 * LAM30 / 2)
    assert_allclose(2 * setup.geometry.aperture_length, 3.188, atol=2e-3)
    assert setup.thinning.active_count() == 320
    assert setup.norm_count == 320


def test_sula_aperture_and_grating():
    setup = make_sula(LAM30, 32)
    assert_allclose(setup.geometry.aperture_length, 155 * LAM30)
    assert setup.thinning.active_count() == 32
    from nfthin.beams import grating_lobe_angles
    pred = grating_lobe_angles(5 * LAM30, LAM30, 0.0)
    assert_allclose(pred.sin_angles, np.array(pred.orders) / 5.0, atol=1e-12)


def test_hula_aperture_and_resolution():
    setup = make_hula(LAM30, 32)
    assert_allclose(setup.geometry.aperture_length, 15.5 * LAM30)
    from nfthin.beams import grating_lobe_angles
    assert grating_lobe_angles(LAM30 / 2, LAM30, 0.0).orders.size == 0
    # beamwidth scales inversely with aperture: compact array is the bluntest
    from nfthin.beams import angle_pattern, mainlobe_extent
    import numpy as np

    def width(s):
        pat = angle_pattern(s.geometry, s.thinning, 0.0)
        lo, hi = mainlobe_extent(pat.values, int(np.argmax(pat.values)))
        return pat.axis[hi] - pat.axis[lo]

    assert width(setup) > width(make_fula(LAM30, 320)) * 5


def test_aperture_matching_across_schemes():
    cfg = BenchmarkConfig()
    dense = cfg.dense_geometry()
    sula = make_sula(cfg.wavelength, cfg.n_active)
    spacing = cfg.wavelength / 2
    assert abs(dense.aperture_length - sula.geometry.aperture_length) <= 10 * spacing
    assert cfg.mula_bounds()[1] - cfg.mula_bounds()[0] >= dense.aperture_length


def test_pta_degenerate_ensemble_equals_sta():
    cfg = small_cfg()
    dense = cfg.dense_geometry()
    users = sample_scenario(4, cfg.range_interval(), cfg.angle_interval(), 3).users
    sc = Scenario(users, seed=3)
    power = cfg.power()
    swarm = SwarmConfig(n_particles=8, n_iterations=12, seed=9)
    mask_pta = make_pta(dense, cfg.n_active, cfg.fixed_set(), [sc, sc], power,
                        swarm, norm_count=1)
    res_sta = optimize_sta(dense, cfg.n_active, cfg.fixed_set(), users, power,
                           swarm, norm_count=1)
    assert mask_pta.to_bitstring() == res_sta.best_mask.to_bitstring()


def test_pta_rejects_empty_ensemble():
    cfg = small_cfg()
    with pytest.raises(ValueError):
        make_pta(cfg.dense_geometry(), cfg.n_active, cfg.fixed_set(), [],
                 cfg.power(), SwarmConfig(seed=0))


def test_static_masks_preserve_edges_and_count():
    cfg = small_cfg(schemes=("GTA", "PTA"))
    masks = compute_static_masks(cfg)
    for name in ("GTA", "PTA"):
        m = masks[name]
        assert m.active_count() == cfg.n_active
        assert m.mask[0] == 1 and m.mask[-1] == 1


def test_gta_mask_reused_without_reoptimization():
    cfg = small_cfg(schemes=("GTA",))
    masks = compute_static_masks(cfg)
    schemes = build_schemes(cfg, masks)
    sc1 = sample_scenario(4, cfg.range_interval(), cfg.angle_interval(), 1)
    sc2 = sample_scenario(4, cfg.range_interval(), cfg.angle_interval(), 2)
    g = schemes["GTA"]
    g.evaluate(sc1, cfg.power())
    g.evaluate(sc2, cfg.power())
    assert g.setup.thinning.to_bitstring() == masks["GTA"].to_bitstring()


def test_sta_masks_vary_across_scenarios():
    cfg = small_cfg()
    scheme = make_sta_scheme(cfg.dense_geometry(), cfg.n_active, cfg.fixed_set(),
                             SwarmConfig(n_particles=10, n_iterations=15),
                             norm_count=1)
    masks = set()
    for t in range(3):
        sc = sample_scenario(6, cfg.range_interval(), cfg.angle_interval(), 100 + t)
        scheme.evaluate(sc, cfg.power(), opt_seed=t)
        masks.add(scheme.last_result.best_mask.to_bitstring())
    assert len(masks) > 1


def test_build_schemes_rejects_unknown_name():
    cfg = small_cfg(schemes=("FOO",))
    with pytest.raises(ValueError):
        build_schemes(cfg, {})


def test_per_scheme_norm_equalizes_single_user_rates():
    cfg = small_cfg(schemes=("FULA", "SULA"), k_users=1)
    schemes = build_schemes(cfg, {}, per_scheme_norm=True)
    sc = sample_scenario(1, cfg.range_interval(), (0.0, 0.0), 17)
    power = cfg.power()
    r_fula = schemes["FULA"].evaluate(sc, power).sum_rate
    r_sula = schemes["SULA"].evaluate(sc, power).sum_rate
    assert abs(r_fula - r_sula) / r_fula < 1e-6
