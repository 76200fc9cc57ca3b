"""CSV/JSON artifact writers and matplotlib figure rendering.

Every figure run drops three files in the output directory: the sampled
data as CSV (17-significant-digit floats, bit-identical across reruns with
one seed), a meta JSON echoing the effective configuration, and an SVG
rendering of the figure.
"""

from __future__ import annotations

import csv
import json
import subprocess
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "nfthin"

import matplotlib.pyplot as plt
import numpy as np

__version__ = "0.1.0"


def fmt(value) -> str:
    "Floats at 17 significant digits (exact float round trip); rest verbatim."
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path, header, rows) -> None:
    "RFC-4180-style CSV with a header row and '.' decimal separator."
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def version_string() -> str:
    "git describe when available, falling back to the package version."
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"nfthin-{__version__}"


def write_meta(path, config: dict, seed: int, extra: dict | None = None) -> None:
    "Meta JSON: effective configuration, master seed, and version string."
    payload = {"config": config, "master_seed": seed, "version": version_string()}
    if extra:
        payload.update(extra)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def save_figure(fig, path) -> None:
    "Write the figure as a static SVG without volatile metadata."
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def beam_figure(angle_cut, range_cut, map_db, map_extent, focus_deg, floor_db=-80.0):
    """Three-panel beam overview: 2D angle/range map plus the two 1D cuts."""
    fig, axes = plt.subplots(1, 3, figsize=(13, 3.8))
    ax = axes[0]
    im = ax.imshow(map_db, origin="lower", aspect="auto", extent=map_extent,
                   vmin=floor_db / 2, vmax=0.0, cmap="viridis")
    ax.set_xlabel(r"$\sin\theta$")
    ax.set_ylabel("range (m, log10)")
    ax.set_title("gain map (dB)")
    fig.colorbar(im, ax=ax)

    ax = axes[1]
    ax.plot(angle_cut.axis, angle_cut.values_db(floor_db), lw=0.8)
    ax.axvline(np.sin(np.radians(focus_deg)), color="r", ls="--", lw=0.8)
    ax.set_xlabel(r"$\sin\theta$")
    ax.set_ylabel("gain (dB)")
    ax.set_ylim(floor_db / 2, 3)
    ax.set_title("angle cut")
    ax.grid(alpha=0.3)

    ax = axes[2]
    ax.semilogx(range_cut.axis, range_cut.values_db(floor_db), lw=0.8)
    ax.axvline(range_cut.focus.range_m, color="r", ls="--", lw=0.8)
    ax.set_xlabel("range (m)")
    ax.set_ylabel("gain (dB)")
    ax.set_ylim(floor_db / 2, 3)
    ax.set_title("range cut")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig


def cdf_figure(samples: dict, xlabel="sum rate (bit/s/Hz)"):
    "Empirical CDF steps, one curve per scheme."
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for name, vals in samples.items():
        xs = np.sort(np.asarray(vals))
        ys = np.arange(1, xs.size + 1) / xs.size
        ax.step(xs, ys, where="post", label=name, lw=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("CDF")
    ax.set_ylim(0, 1)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def range_sweep_figure(mean_ranges, samples: dict, n_bins=12):
    "Per-trial rates vs mean user range: scatter plus binned means."
    fig, ax = plt.subplots(figsize=(6, 4.2))
    r = np.asarray(mean_ranges)
    edges = np.linspace(r.min(), r.max() * 1.0001, n_bins + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    for name, vals in samples.items():
        vals = np.asarray(vals)
        ax.plot(r, vals, ".", ms=3, alpha=0.35)
        binned = [vals[(r >= lo) & (r < hi)] for lo, hi in zip(edges[:-1], edges[1:])]
        means = np.array([b.mean() if b.size else np.nan for b in binned])
        ax.plot(mids, means, "-o", ms=4, label=name, lw=1.4)
    ax.set_xlabel("mean user range (m)")
    ax.set_ylabel("sum rate (bit/s/Hz)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def users_sweep_figure(k_values, mean_table: dict, stderr_table: dict):
    "Average sum rate vs number of users, one line per scheme."
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for name, means in mean_table.items():
        err = stderr_table.get(name)
        ax.errorbar(k_values, means, yerr=err, marker="o", ms=4, lw=1.4,
                    capsize=2, label=name)
    ax.set_xlabel("number of users K")
    ax.set_ylabel("average sum rate (bit/s/Hz)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def pattern_figure(pattern, floor_db=-80.0):
    "Single 1D pattern plot for the CLI pattern command."
    fig, ax = plt.subplots(figsize=(6, 4.2))
    if pattern.axis_kind == "range_m":
        ax.semilogx(pattern.axis, pattern.values_db(floor_db), lw=0.9)
        ax.set_xlabel("range (m)")
    else:
        ax.plot(pattern.axis, pattern.values_db(floor_db), lw=0.9)
        ax.set_xlabel(r"$\sin\theta$")
    ax.set_ylabel("gain (dB)")
    ax.set_ylim(floor_db / 2, 3)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig


def pattern_rows(pattern, floor_db=-80.0):
    "CSV rows (axis_value, gain_linear, gain_db) for a sampled pattern."
    db = pattern.values_db(floor_db)
    return [(a, v, d) for a, v, d in zip(pattern.axis, pattern.values, db)]
