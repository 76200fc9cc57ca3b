"""Monte Carlo benchmark harness and figure artifact generation.

Four canned experiments:

* fig1 -- beam-pattern maps and cuts for the uniform sparse array showing
  grating lobes in angle but not in range.
* fig2 -- FULA vs SULA sum rate with boresight-only users spread in range,
  with each scheme's beamforming gain normalized by its element count.
* fig3 -- sum-rate CDFs of all benchmark schemes (physical, unnormalized
  per-element channels under one shared power budget).
* fig4 -- average sum rate versus the number of served users.

Every trial derives its own seed from the master seed, so results are
bit-identical regardless of the worker count.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, asdict, replace
from pathlib import Path

import numpy as np

from .arrays import ArrayGeometry, FocusPoint, ThinningVector, wavelength_from_carrier
from .beams import (angle_grid, angle_pattern, grating_lobe_angles, local_maxima,
                    pattern_2d, range_grid, range_pattern, range_sidelobe_peak_db,
                    short_range_ripple_db, to_db)
from .channel import pathloss, sample_scenario, trial_seed
from .precoding import PowerConfig
from .pso import SwarmConfig, optimize_gta
from .schemes import (SCHEME_NAMES, make_fula, make_gta_scheme, make_hula,
                      make_mula_scheme, make_pta, make_pta_scheme, make_sta_scheme,
                      make_sula, StaticArrayScheme)
from . import report

# seed-derivation salts, one logical stream per purpose
_SALT_SCENARIO = 1
_SALT_STA = 2
_SALT_MULA = 3
_SALT_GTA = 5
_SALT_PTA = 6
_SALT_PTA_ENSEMBLE = 7


@dataclass(frozen=True)
class BenchmarkConfig:
    """Shared setup for the sum-rate benchmarks (fig2/fig3/fig4)."""

    carrier_hz: float = 30e9
    n_dense: int = 320
    n_active: int = 32
    k_users: int = 16
    snr_db: float = 20.0
    noise_variance: float = 1.0
    angle_bound_deg: float = 60.0
    master_seed: int = 20250811
    n_trials: int = 500
    schemes: tuple = SCHEME_NAMES
    n_particles: int = 50
    n_iterations: int = 100
    coverage_deg: tuple = (0.0, 20.0, -20.0, 40.0, -40.0, 60.0, -60.0)
    tau_psll_db: float = -10.0
    psll_penalty: float = 10.0
    pta_ensemble: int = 100
    mula_bound_wavelengths: float = 80.0
    mula_min_spacing_wavelengths: float = 0.5
    per_user_power: bool = True
    workers: int = 1

    @property
    def wavelength(self) -> float:
        return wavelength_from_carrier(self.carrier_hz)

    def dense_geometry(self) -> ArrayGeometry:
        return ArrayGeometry.uniform(self.wavelength, self.n_dense,
                                     self.wavelength / 2.0)

    def fixed_set(self) -> tuple:
        # edge elements stay active to preserve the full aperture
        return (0, self.n_dense - 1)

    def range_interval(self) -> tuple:
        g = self.dense_geometry()
        return (g.min_valid_range, g.rayleigh_distance / 7.0)

    def angle_interval(self) -> tuple:
        b = np.radians(self.angle_bound_deg)
        return (-b, b)

    def power(self) -> PowerConfig:
        # budget referenced to the farthest service range (cell edge)
        r_edge = self.range_interval()[1]
        return PowerConfig.calibrated(self.snr_db,
                                      pathloss(self.wavelength, r_edge),
                                      self.noise_variance)

    def swarm(self, seed: int = 0) -> SwarmConfig:
        return SwarmConfig(n_particles=self.n_particles,
                           n_iterations=self.n_iterations, seed=seed)

    def mula_bounds(self) -> tuple:
        b = self.mula_bound_wavelengths * self.wavelength
        return (-b, b)


def compute_static_masks(cfg: BenchmarkConfig) -> dict:
    "Pre-optimize the scenario-independent GTA/PTA masks (reused by all trials)."
    masks = {}
    dense = cfg.dense_geometry()
    if "GTA" in cfg.schemes:
        res = optimize_gta(dense, cfg.n_active, cfg.fixed_set(),
                           np.radians(cfg.coverage_deg),
                           cfg.swarm(trial_seed(cfg.master_seed, _SALT_GTA)),
                           tau_psll_db=cfg.tau_psll_db,
                           penalty_weight=cfg.psll_penalty)
        masks["GTA"] = res.best_mask
    if "PTA" in cfg.schemes:
        ensemble = [sample_scenario(cfg.k_users, cfg.range_interval(),
                                    cfg.angle_interval(),
                                    trial_seed(cfg.master_seed, _SALT_PTA_ENSEMBLE, e))
                    for e in range(cfg.pta_ensemble)]
        masks["PTA"] = make_pta(dense, cfg.n_active, cfg.fixed_set(), ensemble,
                                cfg.power(), cfg.swarm(trial_seed(cfg.master_seed, _SALT_PTA)),
                                norm_count=1, per_user_power=cfg.per_user_power)
    return masks


def build_schemes(cfg: BenchmarkConfig, masks: dict, per_scheme_norm: bool = False):
    """Instantiate evaluators for the configured scheme names.

    With `per_scheme_norm` each configuration normalizes its beamforming
    gain by its own element count (the fig2 convention); otherwise raw
    per-element channels are used so the element count shows up as physical
    array gain (the fig3/fig4 convention).
    """
    lam = cfg.wavelength
    dense = cfg.dense_geometry()
    out = {}
    for name in cfg.schemes:
        if name == "FULA":
            setup = make_fula(lam, cfg.n_dense)
            norm = setup.norm_count if per_scheme_norm else 1
            out[name] = StaticArrayScheme(name, setup, norm, cfg.per_user_power)
        elif name == "SULA":
            setup = make_sula(lam, cfg.n_active)
            norm = setup.norm_count if per_scheme_norm else 1
            out[name] = StaticArrayScheme(name, setup, norm, cfg.per_user_power)
        elif name == "HULA":
            setup = make_hula(lam, cfg.n_active)
            norm = setup.norm_count if per_scheme_norm else 1
            out[name] = StaticArrayScheme(name, setup, norm, cfg.per_user_power)
        elif name == "GTA":
            norm = cfg.n_active if per_scheme_norm else 1
            out[name] = make_gta_scheme(dense, masks["GTA"], norm, cfg.per_user_power)
        elif name == "PTA":
            norm = cfg.n_active if per_scheme_norm else 1
            out[name] = make_pta_scheme(dense, masks["PTA"], norm, cfg.per_user_power)
        elif name == "STA":
            norm = cfg.n_active if per_scheme_norm else 1
            out[name] = make_sta_scheme(dense, cfg.n_active, cfg.fixed_set(),
                                        cfg.swarm(), norm, cfg.per_user_power)
        elif name == "MULA":
            norm = cfg.n_active if per_scheme_norm else 1
            out[name] = make_mula_scheme(lam, cfg.n_active, cfg.swarm(),
                                         bounds=cfg.mula_bounds(),
                                         min_spacing=cfg.mula_min_spacing_wavelengths * lam,
                                         norm_count=norm,
                                         per_user_power=cfg.per_user_power)
        else:
            raise ValueError(f"unknown scheme name: {name}")
    return out


_OPT_SALTS = {"STA": _SALT_STA, "MULA": _SALT_MULA}


def run_trial(cfg: BenchmarkConfig, masks: dict, figure_salt: int, trial: int,
              k_users: int | None = None, angle_interval: tuple | None = None,
              per_scheme_norm: bool = False) -> dict:
    "Evaluate every configured scheme on one shared scenario."
    k = cfg.k_users if k_users is None else k_users
    a_int = cfg.angle_interval() if angle_interval is None else angle_interval
    scenario = sample_scenario(k, cfg.range_interval(), a_int,
                               trial_seed(cfg.master_seed, figure_salt,
                                          _SALT_SCENARIO, trial))
    schemes = build_schemes(cfg, masks, per_scheme_norm)
    power = cfg.power()
    out = {"trial": trial, "k": k,
           "mean_range_m": float(np.mean([u.range_m for u in scenario.users]))}
    for name, scheme in schemes.items():
        opt_seed = trial_seed(cfg.master_seed, figure_salt,
                              _OPT_SALTS.get(name, 0), trial)
        rep = scheme.evaluate(scenario, power, opt_seed)
        out[name] = (rep.sum_rate, rep.min_sinr_db())
    return out


def _trial_star(args):
    return run_trial(*args[0], **args[1])


def _run_trials(cfg: BenchmarkConfig, masks: dict, figure_salt: int, n_trials: int,
                **kwargs) -> list:
    jobs = [((cfg, masks, figure_salt, t), kwargs) for t in range(n_trials)]
    if cfg.workers <= 1:
        return [_trial_star(j) for j in jobs]
    workers = min(cfg.workers, n_trials)
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_trial_star, jobs, chunksize=1))
    return results


@dataclass
class AggregateResult:
    "Per-scheme sum-rate samples with simple summary statistics."

    samples: dict
    k_users: int

    def mean(self, name: str) -> float:
        return float(np.mean(self.samples[name]))

    def stderr(self, name: str) -> float:
        v = np.asarray(self.samples[name])
        return float(np.std(v, ddof=1) / np.sqrt(v.size)) if v.size > 1 else 0.0

    def median(self, name: str) -> float:
        return float(np.median(self.samples[name]))

    def cdf(self, name: str) -> tuple:
        "Right-continuous empirical CDF: sorted samples and cumulative probs."
        xs = np.sort(np.asarray(self.samples[name]))
        return xs, np.arange(1, xs.size + 1) / xs.size

    def summary(self) -> dict:
        return {name: {"mean": self.mean(name), "stderr": self.stderr(name),
                       "median": self.median(name)} for name in self.samples}


def _collect(cfg, rows, names) -> AggregateResult:
    samples = {n: np.array([r[n][0] for r in rows]) for n in names}
    return AggregateResult(samples, cfg.k_users)


# ---------------------------------------------------------------------------
# fig1: beam patterns of the uniform sparse array


@dataclass(frozen=True)
class PatternStudyConfig:
    "Setup for the angle/range grating-lobe study."

    carrier_hz: float = 15e9
    n_elements: int = 256
    spacing_wavelengths: float = 2.0
    focus_deg: float = 0.0
    focus_range_divisor: float = 30.0   # focus at rayleigh_distance / divisor
    angle_points: int = 8192
    range_points: int = 4096
    map_angle_points: int = 1025
    map_range_points: int = 768

    @property
    def wavelength(self) -> float:
        return wavelength_from_carrier(self.carrier_hz)

    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry.uniform(self.wavelength, self.n_elements,
                                     self.spacing_wavelengths * self.wavelength)

    def focus(self) -> FocusPoint:
        g = self.geometry()
        return FocusPoint(np.radians(self.focus_deg),
                          g.rayleigh_distance / self.focus_range_divisor)


def run_fig1(cfg: PatternStudyConfig | None = None, outdir=None) -> dict:
    """Angle/range pattern study; returns the key measurements.

    Emits the 1D cuts as CSV, a three-panel SVG (2D map plus cuts), and a
    meta JSON with the measured lobe geometry.
    """
    if cfg is None:
        cfg = PatternStudyConfig()
    geom = cfg.geometry()
    mask = ThinningVector.full(cfg.n_elements)
    focus = cfg.focus()

    cut_a = angle_pattern(geom, mask, focus.angle, angle_grid(cfg.angle_points))
    cut_r = range_pattern(geom, mask, focus,
                          range_grid(geom.rayleigh_distance, n_points=cfg.range_points))

    predicted = grating_lobe_angles(geom.positions[1], geom.wavelength, focus.angle)
    peaks = local_maxima(cut_a.values)
    # measured lobes: local maxima within 1% of the mainlobe, off the mainlobe
    strong = peaks[cut_a.values[peaks] >= 0.99 * cut_a.values.max()]
    u0 = np.sin(focus.angle)
    measured = [float(np.arcsin(cut_a.axis[i])) for i in strong
                if abs(cut_a.axis[i] - u0) > 2.0 * geom.wavelength / geom.aperture_length]

    focus_idx = int(np.argmin(np.abs(cut_r.axis - focus.range_m)))
    measurements = {
        "predicted_lobe_angles_rad": [float(a) for a in predicted.visible_angles()],
        "measured_lobe_angles_rad": measured,
        "measured_lobe_gain_db": float(np.max(to_db(cut_a.values[strong]))
                                       if strong.size else -np.inf),
        "focus_gain_db": float(to_db(np.array([cut_r.values[focus_idx]]))[0]),
        "range_sidelobe_peak_db": range_sidelobe_peak_db(cut_r),
        "short_range_ripple_db": short_range_ripple_db(geom, mask, focus),
    }

    if outdir is not None:
        outdir = Path(outdir)
        rows = [("angle", a, v, d) for (a, v, d) in report.pattern_rows(cut_a)]
        rows += [("range", a, v, d) for (a, v, d) in report.pattern_rows(cut_r)]
        report.write_csv(outdir / "fig1_data.csv",
                         ["cut", "axis_value", "gain_linear", "gain_db"], rows)
        grid_u = angle_grid(cfg.map_angle_points)
        grid_r = range_grid(geom.rayleigh_distance, n_points=cfg.map_range_points)
        gains = pattern_2d(geom, mask, focus, grid_u, grid_r)
        extent = (-1.0, 1.0, np.log10(grid_r[0]), np.log10(grid_r[-1]))
        fig = report.beam_figure(cut_a, cut_r, to_db(gains), extent, cfg.focus_deg)
        report.save_figure(fig, outdir / "fig1.svg")
        report.write_meta(outdir / "fig1_meta.json", asdict(cfg), 0,
                          {"measurements": measurements})
    return measurements


# ---------------------------------------------------------------------------
# fig2/fig3/fig4 sum-rate experiments


def run_fig2(cfg: BenchmarkConfig | None = None, outdir=None) -> tuple:
    """FULA vs SULA with boresight users; per-scheme gain normalization.

    Returns (AggregateResult, mean ranges per trial).
    """
    if cfg is None:
        cfg = BenchmarkConfig()
    cfg = replace(cfg, schemes=("FULA", "SULA"))
    rows = _run_trials(cfg, {}, 20, cfg.n_trials, angle_interval=(0.0, 0.0),
                       per_scheme_norm=True)
    agg = _collect(cfg, rows, cfg.schemes)
    mean_ranges = np.array([r["mean_range_m"] for r in rows])
    if outdir is not None:
        outdir = Path(outdir)
        csv_rows = [(n, r["trial"], r["k"], r[n][0], r[n][1], r["mean_range_m"])
                    for r in rows for n in cfg.schemes]
        report.write_csv(outdir / "fig2_data.csv",
                         ["scheme", "trial", "K", "sum_rate", "min_sinr_db",
                          "mean_range_m"], csv_rows)
        fig = report.range_sweep_figure(mean_ranges, agg.samples)
        report.save_figure(fig, outdir / "fig2.svg")
        report.write_meta(outdir / "fig2_meta.json", asdict(cfg), cfg.master_seed,
                          {"summary": agg.summary()})
    return agg, mean_ranges


def run_fig3(cfg: BenchmarkConfig | None = None, outdir=None) -> AggregateResult:
    "Sum-rate CDF benchmark across all configured schemes."
    if cfg is None:
        cfg = BenchmarkConfig()
    masks = compute_static_masks(cfg)
    rows = _run_trials(cfg, masks, 30, cfg.n_trials)
    agg = _collect(cfg, rows, cfg.schemes)
    if outdir is not None:
        outdir = Path(outdir)
        csv_rows = [(n, r["trial"], r["k"], r[n][0], r[n][1])
                    for r in rows for n in cfg.schemes]
        report.write_csv(outdir / "fig3_data.csv",
                         ["scheme", "trial", "K", "sum_rate", "min_sinr_db"], csv_rows)
        fig = report.cdf_figure(agg.samples)
        report.save_figure(fig, outdir / "fig3.svg")
        extra = {"summary": agg.summary(),
                 "masks": {k: m.to_bitstring() for k, m in masks.items()}}
        report.write_meta(outdir / "fig3_meta.json", asdict(cfg), cfg.master_seed, extra)
    return agg


def run_fig4(cfg: BenchmarkConfig | None = None,
             k_values=(2, 4, 8, 16, 24, 32), outdir=None) -> dict:
    "Average sum rate vs number of users; returns {K: AggregateResult}."
    if cfg is None:
        cfg = BenchmarkConfig()
    results = {}
    all_rows = []
    for k in k_values:
        cfg_k = replace(cfg, k_users=int(k))
        masks = compute_static_masks(cfg_k)
        rows = _run_trials(cfg_k, masks, 40 + int(k), cfg.n_trials)
        results[int(k)] = _collect(cfg_k, rows, cfg.schemes)
        all_rows += [(n, int(k), r["trial"], r[n][0], r[n][1])
                     for r in rows for n in cfg.schemes]
    if outdir is not None:
        outdir = Path(outdir)
        report.write_csv(outdir / "fig4_data.csv",
                         ["scheme", "K", "trial", "sum_rate", "min_sinr_db"], all_rows)
        means = {n: [results[int(k)].mean(n) for k in k_values] for n in cfg.schemes}
        errs = {n: [results[int(k)].stderr(n) for k in k_values] for n in cfg.schemes}
        fig = report.users_sweep_figure(list(k_values), means, errs)
        report.save_figure(fig, outdir / "fig4.svg")
        summary = {str(k): results[int(k)].summary() for k in k_values}
        report.write_meta(outdir / "fig4_meta.json", asdict(cfg), cfg.master_seed,
                          {"k_values": list(k_values), "summary": summary})
    return results


def run_oracle_suite(verbose: bool = True) -> list:
    "Run every brute-force and invariant check; returns OracleCheck list."
    from . import oracle
    checks = oracle.run_all()
    if verbose:
        for c in checks:
            state = "PASS" if c.passed else "FAIL"
            print(f"[{state}] {c.name}: {c.detail}")
    return checks
