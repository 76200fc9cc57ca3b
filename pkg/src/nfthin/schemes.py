"""Benchmark array configurations and their per-trial evaluators.

Five fixed designs plus the two adaptive ones:

* FULA -- dense uniform array, every element active (upper bound).
* SULA -- uniform sparse array matching the dense aperture with few elements.
* HULA -- compact half-wavelength array with the same element count.
* GTA  -- thinning mask pre-optimized for worst-case sidelobe level.
* PTA  -- thinning mask pre-optimized for ensemble-average sum rate.
* STA  -- thinning mask re-optimized for each channel realization.
* MULA -- movable elements re-positioned for each channel realization.

All aperture-matched designs share the dense array's span; the compact
HULA intentionally does not.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .arrays import ArrayGeometry, ThinningVector
from .channel import Scenario
from .precoding import PowerConfig, RateReport, evaluate_rates
from .pso import (SwarmConfig, SwarmResult, optimize_gta, optimize_positions_mula,
                  optimize_sta, optimize_sta_ensemble)

SCHEME_NAMES = ("FULA", "MULA", "STA", "GTA", "PTA", "SULA", "HULA")


@dataclass(frozen=True)
class ArraySetup:
    "A named geometry/mask pair with its natural normalization count."

    name: str
    geometry: ArrayGeometry
    thinning: ThinningVector
    norm_count: int


def make_fula(wavelength: float, n_elements: int = 320,
              spacing: float | None = None) -> ArraySetup:
    "Dense uniform array with all elements active."
    if spacing is None:
        spacing = wavelength / 2.0
    geom = ArrayGeometry.uniform(wavelength, n_elements, spacing)
    return ArraySetup("FULA", geom, ThinningVector.full(n_elements), n_elements)


def make_sula(wavelength: float, n_active: int = 32,
              spacing: float | None = None) -> ArraySetup:
    "Uniform sparse array; the default 5-wavelength spacing tracks the dense aperture."
    if spacing is None:
        spacing = 5.0 * wavelength
    geom = ArrayGeometry.uniform(wavelength, n_active, spacing)
    return ArraySetup("SULA", geom, ThinningVector.full(n_active), n_active)


def make_hula(wavelength: float, n_active: int = 32,
              spacing: float | None = None) -> ArraySetup:
    "Compact half-wavelength array; small aperture, no grating lobes."
    if spacing is None:
        spacing = wavelength / 2.0
    geom = ArrayGeometry.uniform(wavelength, n_active, spacing)
    return ArraySetup("HULA", geom, ThinningVector.full(n_active), n_active)


def make_pta(dense: ArrayGeometry, n_active: int, fixed_set: Sequence[int],
             ensemble: Sequence[Scenario], power: PowerConfig, cfg: SwarmConfig,
             norm_count: int | None = None,
             per_user_power: bool = False) -> ThinningVector:
    """Statistical-CSI mask: best average rate over a scenario ensemble.

    Computed once and reused across trials; a degenerate ensemble of one
    scenario reduces to the per-scenario optimizer.
    """
    if len(ensemble) == 0:
        raise ValueError("PTA needs a non-empty scenario ensemble")
    res = optimize_sta_ensemble(dense, n_active, fixed_set, ensemble, power, cfg,
                                norm_count=norm_count, per_user_power=per_user_power)
    return res.best_mask


class StaticArrayScheme:
    "Fixed geometry and mask; evaluation needs no optimization."

    def __init__(self, name: str, setup: ArraySetup, norm_count: int | None = None,
                 per_user_power: bool = False):
        self.name = name
        self.setup = setup
        self.norm_count = setup.norm_count if norm_count is None else norm_count
        self.per_user_power = per_user_power

    def evaluate(self, scenario: Scenario, power: PowerConfig,
                 opt_seed: int = 0) -> RateReport:
        return evaluate_rates(self.setup.geometry, self.setup.thinning, scenario.users,
                              power, self.norm_count, per_user_power=self.per_user_power)


class StaScheme:
    "Per-realization mask optimization on the dense grid."

    def __init__(self, dense: ArrayGeometry, n_active: int, fixed_set: Sequence[int],
                 swarm: SwarmConfig, norm_count: int | None = None,
                 per_user_power: bool = False):
        self.name = "STA"
        self.dense = dense
        self.n_active = n_active
        self.fixed_set = tuple(fixed_set)
        self.swarm = swarm
        self.norm_count = n_active if norm_count is None else norm_count
        self.per_user_power = per_user_power
        self.last_result: SwarmResult | None = None

    def evaluate(self, scenario: Scenario, power: PowerConfig,
                 opt_seed: int = 0) -> RateReport:
        cfg = replace(self.swarm, seed=opt_seed)
        res = optimize_sta(self.dense, self.n_active, self.fixed_set, scenario.users,
                           power, cfg, norm_count=self.norm_count,
                           per_user_power=self.per_user_power)
        self.last_result = res
        return evaluate_rates(self.dense, res.best_mask, scenario.users, power,
                              self.norm_count, per_user_power=self.per_user_power)


class MulaScheme:
    "Per-realization continuous element placement."

    def __init__(self, wavelength: float, n_elements: int, swarm: SwarmConfig,
                 bounds: tuple | None = None, min_spacing: float | None = None,
                 norm_count: int | None = None, per_user_power: bool = False):
        self.name = "MULA"
        self.wavelength = wavelength
        self.n_elements = n_elements
        self.swarm = swarm
        self.bounds = bounds
        self.min_spacing = min_spacing
        self.norm_count = n_elements if norm_count is None else norm_count
        self.per_user_power = per_user_power
        self.last_result: SwarmResult | None = None

    def evaluate(self, scenario: Scenario, power: PowerConfig,
                 opt_seed: int = 0) -> RateReport:
        cfg = replace(self.swarm, seed=opt_seed)
        res = optimize_positions_mula(scenario.users, self.n_elements, self.wavelength,
                                      power, cfg, bounds=self.bounds,
                                      min_spacing=self.min_spacing,
                                      norm_count=self.norm_count,
                                      per_user_power=self.per_user_power)
        self.last_result = res
        geom = ArrayGeometry(self.wavelength, res.best_vector)
        return evaluate_rates(geom, ThinningVector.full(self.n_elements), scenario.users,
                              power, self.norm_count,
                              per_user_power=self.per_user_power)


def make_gta_scheme(dense: ArrayGeometry, mask: ThinningVector,
                    norm_count: int | None = None,
                    per_user_power: bool = False) -> StaticArrayScheme:
    "Bind a precomputed sidelobe-optimized mask for reuse across trials."
    setup = ArraySetup("GTA", dense, mask, mask.active_count())
    return StaticArrayScheme("GTA", setup, norm_count, per_user_power)


def make_pta_scheme(dense: ArrayGeometry, mask: ThinningVector,
                    norm_count: int | None = None,
                    per_user_power: bool = False) -> StaticArrayScheme:
    "Bind a precomputed statistical-CSI mask for reuse across trials."
    setup = ArraySetup("PTA", dense, mask, mask.active_count())
    return StaticArrayScheme("PTA", setup, norm_count, per_user_power)


def make_sta_scheme(dense: ArrayGeometry, n_active: int, fixed_set: Sequence[int],
                    swarm: SwarmConfig, norm_count: int | None = None,
                    per_user_power: bool = False) -> StaScheme:
    return StaScheme(dense, n_active, fixed_set, swarm, norm_count, per_user_power)


def make_mula_scheme(wavelength: float, n_elements: int, swarm: SwarmConfig,
                     bounds: tuple | None = None, min_spacing: float | None = None,
                     norm_count: int | None = None,
                     per_user_power: bool = False) -> MulaScheme:
    return MulaScheme(wavelength, n_elements, swarm, bounds, min_spacing,
                      norm_count, per_user_power)
