"""Command-line entry point: figures, optimizers, analyses, oracle suite.

Exit codes: 0 on success, 1 on configuration errors, 2 when the oracle
suite reports a failure.  The master seed falls back to the NF_THIN_SEED
environment variable when no --seed is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .arrays import ArrayGeometry, FocusPoint, ThinningVector, wavelength_from_carrier
from .beams import angle_grid, angle_pattern, grating_lobe_angles, range_grid, range_pattern
from .channel import sample_scenario, scenario_from_csv, trial_seed
from .config import ConfigError, DEFAULTS, apply_overrides, load_config
from .experiments import (BenchmarkConfig, PatternStudyConfig, run_fig1, run_fig2,
                          run_fig3, run_fig4, run_oracle_suite)
from .pso import SwarmConfig, optimize_gta, optimize_positions_mula, optimize_sta
from . import report

DEFAULT_SEED = 20250811


class _Parser(argparse.ArgumentParser):
    "Argument errors surface as config errors (exit code 1)."

    def error(self, message):
        raise ConfigError(message)


def _tunables_epilog() -> str:
    lines = ["configuration keys for --set section.key=value "
             "(also valid in the --config JSON file):"]
    for section, entries in DEFAULTS.items():
        for key, default in entries.items():
            lines.append(f"  {section}.{key} (default {default})")
    return "\n".join(lines)


def build_parser() -> _Parser:
    p = _Parser(prog="nf-thin",
                description="Thinned-array design and evaluation for near-field "
                            "multi-user MIMO.",
                epilog=_tunables_epilog(),
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file (flat sections per module)")
        sp.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE", help="override one config value")
        sp.add_argument("--outdir", default="out", help="artifact output directory")
        sp.add_argument("--seed", type=int, default=None,
                        help="master seed (fallback: NF_THIN_SEED, then "
                             f"{DEFAULT_SEED})")
        sp.add_argument("--workers", type=int, default=None,
                        help="trial-level worker processes (default: config value)")
        sp.add_argument("-v", "--verbose", action="store_true")

    sp = sub.add_parser("fig1", help="beam-pattern maps and cuts (grating-lobe study)")
    common(sp)

    for name, help_ in (("fig2", "FULA vs SULA, boresight users spread in range"),
                        ("fig3", "sum-rate CDFs across all benchmark schemes"),
                        ("fig4", "average sum rate vs number of users")):
        sp = sub.add_parser(name, help=help_)
        common(sp)
        sp.add_argument("--trials", type=int, default=None)
        sp.add_argument("--snr-db", type=float, default=None)
        if name != "fig4":
            sp.add_argument("--k", type=int, default=None, help="number of users")
        else:
            sp.add_argument("--k-values", default=None,
                            help="comma-separated user counts")

    sp = sub.add_parser("pattern", help="sample an angle or range beam pattern")
    common(sp)
    sp.add_argument("--domain", choices=["angle", "range"], default="angle")
    sp.add_argument("--carrier-hz", type=float, default=15e9)
    sp.add_argument("--n", type=int, default=256, help="number of grid elements")
    sp.add_argument("--spacing-wl", type=float, default=2.0,
                    help="element spacing in wavelengths")
    sp.add_argument("--focus-deg", type=float, default=0.0)
    sp.add_argument("--focus-range", type=float, default=None,
                    help="focus range in meters (default: rayleigh/30)")
    sp.add_argument("--mask", default=None,
                    help="activation bit string, element 0 first (default: all on)")
    sp.add_argument("--norm", choices=["elements", "active"], default="elements",
                    help="normalization divisor for the pattern")

    sp = sub.add_parser("grating", help="closed-form grating-lobe angles")
    common(sp)
    sp.add_argument("--d-over-lambda", type=float, required=True,
                    help="element spacing in wavelengths")
    sp.add_argument("--focus-deg", type=float, default=0.0)

    sp = sub.add_parser("thin-gta", help="optimize a sidelobe-suppressing mask")
    common(sp)

    sp = sub.add_parser("thin-sta", help="optimize a sum-rate mask for one scenario")
    common(sp)
    sp.add_argument("--scenario", default=None,
                    help="scenario CSV (user_id,theta_rad,range_m); default: sampled")

    sp = sub.add_parser("mula", help="optimize movable element positions")
    common(sp)
    sp.add_argument("--scenario", default=None)

    sp = sub.add_parser("oracle", help="run the brute-force and invariant checks")
    common(sp)
    return p


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("NF_THIN_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"NF_THIN_SEED={env!r} is not an integer")
    return DEFAULT_SEED


def _load(args) -> dict:
    cfg = load_config(args.config)
    return apply_overrides(cfg, args.overrides)


def _benchmark_config(cfg: dict, args, **extra) -> BenchmarkConfig:
    b, pso = cfg["benchmark"], cfg["pso"]
    values = dict(
        carrier_hz=b["carrier_hz"], n_dense=b["n_dense"], n_active=b["n_active"],
        k_users=b["k_users"], snr_db=b["snr_db"], noise_variance=b["noise_variance"],
        angle_bound_deg=b["angle_bound_deg"], master_seed=_resolve_seed(args),
        n_trials=b["n_trials"], schemes=tuple(b["schemes"]),
        n_particles=pso["n_particles"], n_iterations=pso["n_iterations"],
        coverage_deg=tuple(cfg["gta"]["coverage_deg"]),
        tau_psll_db=cfg["gta"]["tau_psll_db"], psll_penalty=cfg["gta"]["psll_penalty"],
        pta_ensemble=cfg["pta"]["ensemble_size"],
        mula_bound_wavelengths=cfg["mula"]["bound_wavelengths"],
        mula_min_spacing_wavelengths=cfg["mula"]["min_spacing_wavelengths"],
        per_user_power=b["per_user_power"],
        workers=b["workers"] if args.workers is None else args.workers,
    )
    if getattr(args, "trials", None) is not None:
        values["n_trials"] = args.trials
    if getattr(args, "snr_db", None) is not None:
        values["snr_db"] = args.snr_db
    if getattr(args, "k", None) is not None:
        values["k_users"] = args.k
    values.update(extra)
    return BenchmarkConfig(**values)


def _swarm_from(cfg: dict, seed: int) -> SwarmConfig:
    p = cfg["pso"]
    return SwarmConfig(n_particles=p["n_particles"], n_iterations=p["n_iterations"],
                       inertia_start=p["inertia_start"], inertia_end=p["inertia_end"],
                       cognitive=p["cognitive"], social=p["social"],
                       velocity_clamp=p["velocity_clamp"], seed=seed)


def _write_swarm_result(path, result, label, cfg, seed) -> None:
    payload = result.to_json_dict()
    payload["kind"] = label
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    report.write_meta(path.with_name(path.stem + "_meta.json"), cfg, seed)


def _cmd_fig1(args) -> int:
    cfg = _load(args)
    f1 = cfg["fig1"]
    study = PatternStudyConfig(
        carrier_hz=f1["carrier_hz"], n_elements=f1["n_elements"],
        spacing_wavelengths=f1["spacing_wavelengths"], focus_deg=f1["focus_deg"],
        focus_range_divisor=f1["focus_range_divisor"],
        angle_points=cfg["beam"]["angle_points"],
        range_points=cfg["beam"]["range_points"])
    meas = run_fig1(study, args.outdir)
    if args.verbose:
        for k, v in meas.items():
            print(f"{k}: {v}")
    print(f"fig1 artifacts written to {args.outdir}")
    return 0


def _cmd_fig2(args) -> int:
    cfg = _benchmark_config(_load(args), args)
    agg, _ = run_fig2(cfg, args.outdir)
    ratio = agg.mean("SULA") / agg.mean("FULA")
    print(f"fig2: mean sum-rate SULA/FULA = {ratio:.4f} over {cfg.n_trials} trials")
    return 0


def _cmd_fig3(args) -> int:
    cfg = _benchmark_config(_load(args), args)
    agg = run_fig3(cfg, args.outdir)
    for name in cfg.schemes:
        print(f"{name}: mean {agg.mean(name):.2f} bit/s/Hz "
              f"(median {agg.median(name):.2f})")
    return 0


def _cmd_fig4(args) -> int:
    cfg_d = _load(args)
    cfg = _benchmark_config(cfg_d, args)
    if args.k_values is not None:
        k_values = tuple(int(x) for x in args.k_values.split(","))
    else:
        k_values = tuple(cfg_d["fig4"]["k_values"])
    results = run_fig4(cfg, k_values, args.outdir)
    for k in k_values:
        line = " ".join(f"{n}={results[k].mean(n):.1f}" for n in cfg.schemes)
        print(f"K={k}: {line}")
    return 0


def _cmd_pattern(args) -> int:
    cfg = _load(args)
    lam = wavelength_from_carrier(args.carrier_hz)
    geom = ArrayGeometry.uniform(lam, args.n, args.spacing_wl * lam)
    mask = (ThinningVector.full(args.n) if args.mask is None
            else ThinningVector.from_bitstring(args.mask))
    if mask.n_elements != args.n:
        raise ConfigError(f"mask length {mask.n_elements} != --n {args.n}")
    r_f = args.focus_range or geom.rayleigh_distance / 30.0
    focus = FocusPoint(np.radians(args.focus_deg), r_f)
    norm = geom.n_elements if args.norm == "elements" else mask.active_count()
    beam = cfg["beam"]
    if args.domain == "angle":
        pat = angle_pattern(geom, mask, focus.angle,
                            angle_grid(beam["angle_points"]), norm)
    else:
        pat = range_pattern(geom, mask, focus,
                            range_grid(geom.rayleigh_distance,
                                       n_points=beam["range_points"]), norm)
    outdir = Path(args.outdir)
    report.write_csv(outdir / "pattern_data.csv",
                     ["axis_value", "gain_linear", "gain_db"],
                     report.pattern_rows(pat, beam["floor_db"]))
    report.save_figure(report.pattern_figure(pat, beam["floor_db"]),
                       outdir / "pattern.svg")
    report.write_meta(outdir / "pattern_meta.json",
                      {"domain": args.domain, "carrier_hz": args.carrier_hz,
                       "n": args.n, "spacing_wl": args.spacing_wl,
                       "focus_deg": args.focus_deg, "focus_range_m": r_f,
                       "norm_count": norm, "mask": mask.to_bitstring()},
                      _resolve_seed(args))
    print(f"pattern artifacts written to {outdir}")
    return 0


def _cmd_grating(args) -> int:
    lam = 1.0
    pred = grating_lobe_angles(args.d_over_lambda * lam, lam,
                               np.radians(args.focus_deg))
    degs = np.degrees(pred.visible_angles())
    print(", ".join(f"{d:.3f}" for d in degs) if degs.size else "none")
    return 0


def _cmd_thin_gta(args) -> int:
    cfg = _load(args)
    bench = _benchmark_config(cfg, args)
    seed = trial_seed(bench.master_seed, 5)
    res = optimize_gta(bench.dense_geometry(), bench.n_active, bench.fixed_set(),
                       np.radians(bench.coverage_deg), _swarm_from(cfg, seed),
                       tau_psll_db=bench.tau_psll_db,
                       penalty_weight=bench.psll_penalty,
                       grid=angle_grid(cfg["beam"]["angle_points"]),
                       exclusion_factor=cfg["beam"]["exclusion_factor"])
    _write_swarm_result(Path(args.outdir) / "gta_result.json", res,
                        "gta", cfg, bench.master_seed)
    print(f"worst-case sidelobe cost {res.best_cost:.3f} dB; "
          f"mask written to {args.outdir}/gta_result.json")
    return 0


def _scenario_for(args, bench: BenchmarkConfig):
    if args.scenario is not None:
        return scenario_from_csv(args.scenario, seed=bench.master_seed)
    return sample_scenario(bench.k_users, bench.range_interval(),
                           bench.angle_interval(),
                           trial_seed(bench.master_seed, 1, 0))


def _cmd_thin_sta(args) -> int:
    cfg = _load(args)
    bench = _benchmark_config(cfg, args)
    scenario = _scenario_for(args, bench)
    res = optimize_sta(bench.dense_geometry(), bench.n_active, bench.fixed_set(),
                       scenario.users, bench.power(),
                       _swarm_from(cfg, trial_seed(bench.master_seed, 2, 0)),
                       norm_count=1, per_user_power=bench.per_user_power)
    _write_swarm_result(Path(args.outdir) / "sta_result.json", res,
                        "sta", cfg, bench.master_seed)
    print(f"sum rate {-res.best_cost:.3f} bit/s/Hz; "
          f"mask written to {args.outdir}/sta_result.json")
    return 0


def _cmd_mula(args) -> int:
    cfg = _load(args)
    bench = _benchmark_config(cfg, args)
    scenario = _scenario_for(args, bench)
    res = optimize_positions_mula(
        scenario.users, bench.n_active, bench.wavelength, bench.power(),
        _swarm_from(cfg, trial_seed(bench.master_seed, 3, 0)),
        bounds=bench.mula_bounds(),
        min_spacing=bench.mula_min_spacing_wavelengths * bench.wavelength,
        norm_count=1, per_user_power=bench.per_user_power)
    _write_swarm_result(Path(args.outdir) / "mula_result.json", res,
                        "mula", cfg, bench.master_seed)
    print(f"sum rate {-res.best_cost:.3f} bit/s/Hz; "
          f"positions written to {args.outdir}/mula_result.json")
    return 0


def _cmd_oracle(args) -> int:
    checks = run_oracle_suite(verbose=True)
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return 2 if failed else 0


_COMMANDS = {
    "fig1": _cmd_fig1,
    "fig2": _cmd_fig2,
    "fig3": _cmd_fig3,
    "fig4": _cmd_fig4,
    "pattern": _cmd_pattern,
    "grating": _cmd_grating,
    "thin-gta": _cmd_thin_gta,
    "thin-sta": _cmd_thin_sta,
    "mula": _cmd_mula,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
