"""Particle swarm engine with top-k binarization and the thinning objectives.

The engine minimizes a batch cost over positions in [0, 1]^n with the
classic velocity/position update: inertia-weighted velocity plus cognitive
and social pulls with fresh uniform scalars per particle per iteration.
Personal/global bests move only on strict improvement, and all best updates
happen at an iteration barrier in particle-index order, so a fixed seed
yields a bit-identical result regardless of how the cost batch is computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .arrays import ArrayGeometry, FocusPoint, ThinningVector
from .beams import DEFAULT_EXCLUSION_FACTOR, angle_grid
from .channel import UserLocation, channel_matrix, make_rng
from .precoding import PowerConfig, batched_sum_rates, masked_sum_rates


@dataclass(frozen=True)
class SwarmConfig:
    "Swarm size, iteration budget, update coefficients, and the seed."

    n_particles: int = 50
    n_iterations: int = 100
    inertia_start: float = 0.9
    inertia_end: float = 0.4
    cognitive: float = 1.49445
    social: float = 1.49445
    velocity_clamp: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.n_particles < 2:
            raise ValueError("need at least 2 particles")
        if self.n_iterations < 1:
            raise ValueError("need at least 1 iteration")
        for w in (self.inertia_start, self.inertia_end):
            if not 0.0 <= w <= 1.0:
                raise ValueError("inertia weights must lie in [0, 1]")
        # zero coefficients are allowed so a swarm can be deliberately frozen
        if self.cognitive < 0 or self.social < 0:
            raise ValueError("acceleration coefficients must be non-negative")
        if self.velocity_clamp <= 0:
            raise ValueError("velocity clamp must be positive")

    def inertia_at(self, iteration: int) -> float:
        "Linear decay from `inertia_start` to `inertia_end`."
        if self.n_iterations == 1:
            return self.inertia_start
        t = iteration / (self.n_iterations - 1)
        return self.inertia_start + (self.inertia_end - self.inertia_start) * t


@dataclass(frozen=True)
class SwarmResult:
    """Best candidate found, its cost, and the per-iteration best-cost trace.

    `best_mask` is set for thinning runs, `best_vector` for continuous runs
    (decoded element positions).  `best_cost` is in the engine's
    minimization sense; objectives that maximize pass their value negated.
    """

    best_mask: ThinningVector | None
    best_vector: np.ndarray | None
    best_cost: float
    cost_history: np.ndarray
    config: SwarmConfig
    n_evaluations: int

    def to_json_dict(self) -> dict:
        d = {
            "best_cost": self.best_cost,
            "cost_history": [float(c) for c in self.cost_history],
            "n_evaluations": self.n_evaluations,
            "config": {
                "n_particles": self.config.n_particles,
                "n_iterations": self.config.n_iterations,
                "inertia_start": self.config.inertia_start,
                "inertia_end": self.config.inertia_end,
                "cognitive": self.config.cognitive,
                "social": self.config.social,
                "velocity_clamp": self.config.velocity_clamp,
                "seed": self.config.seed,
            },
        }
        if self.best_mask is not None:
            # first character of the bit string is element 0
            d["mask"] = self.best_mask.to_bitstring()
            d["active_indices"] = [int(i) for i in self.best_mask.active_indices()]
        if self.best_vector is not None:
            d["positions_m"] = [float(x) for x in self.best_vector]
        return d


def top_k_binarize(x: np.ndarray, n_active: int, fixed_set: Sequence[int],
                   n_total: int) -> ThinningVector:
    """Activate the fixed indices plus the k largest priority entries.

    `x` has one entry per non-fixed element, ordered by element index.
    Ties select the lowest element index, so the mapping is deterministic.
    """
    fixed = sorted(set(int(i) for i in fixed_set))
    if n_active > n_total:
        raise ValueError(f"cannot activate {n_active} of {n_total} elements")
    if n_active < len(fixed):
        raise ValueError("n_active smaller than the mandatory set")
    variable = np.setdiff1d(np.arange(n_total), fixed)
    if x.shape[-1] != variable.size:
        raise ValueError(f"priority vector must have length {variable.size}")
    k = n_active - len(fixed)
    # stable argsort on -x keeps the earliest index first among ties
    order = np.argsort(-x, kind="stable")[:k]
    mask = np.zeros(n_total, dtype=np.int8)
    mask[variable[order]] = 1
    mask[fixed] = 1
    return ThinningVector(mask, frozenset(fixed))


def _topk_rows(X: np.ndarray, k: int) -> np.ndarray:
    "Row-wise indices of the k largest entries, ties to the lowest index."
    order = np.argsort(-X, axis=1, kind="stable")[:, :k]
    return np.sort(order, axis=1)


def _memoized_batch(evaluate_rows):
    """Cache batch-cost rows by mask bytes.

    Particles revisit the same mask constantly once the swarm contracts, and
    on small instances the whole feasible set fits in the cache; values are
    identical to uncached evaluation.
    """
    cache: dict = {}

    def wrapped(rows: np.ndarray) -> np.ndarray:
        keys = [r.tobytes() for r in rows]
        missing = [i for i, k in enumerate(keys) if k not in cache]
        if missing:
            fresh = evaluate_rows(rows[missing])
            for i, c in zip(missing, fresh):
                cache[keys[i]] = float(c)
        return np.array([cache[k] for k in keys])

    return wrapped


def minimize_swarm(batch_cost: Callable[[np.ndarray], np.ndarray], n_dims: int,
                   cfg: SwarmConfig) -> tuple:
    """Run the swarm; returns (best_x, best_cost, history, n_evaluations).

    `batch_cost` maps a (P, n_dims) position matrix to one cost per row;
    non-finite costs are treated as +inf.  The returned history has one
    entry for the initial evaluation plus one per iteration and is
    non-increasing.
    """
    if n_dims < 1:
        raise ValueError("need at least one dimension")
    rng = make_rng(cfg.seed)
    P = cfg.n_particles
    X = rng.random((P, n_dims))
    V = (2.0 * rng.random((P, n_dims)) - 1.0) * cfg.velocity_clamp

    def safe(c):
        c = np.asarray(c, dtype=float)
        return np.where(np.isfinite(c), c, np.inf)

    costs = safe(batch_cost(X))
    n_evals = P
    pbest_x = X.copy()
    pbest_cost = costs.copy()
    g = int(np.argmin(costs))  # first index wins ties
    gbest_x = X[g].copy()
    gbest_cost = float(costs[g])
    history = [gbest_cost]

    for t in range(cfg.n_iterations):
        w = cfg.inertia_at(t)
        u = rng.random((P, 2))
        V = (w * V
             + cfg.cognitive * u[:, :1] * (pbest_x - X)
             + cfg.social * u[:, 1:] * (gbest_x - X))
        np.clip(V, -cfg.velocity_clamp, cfg.velocity_clamp, out=V)
        X = np.clip(X + V, 0.0, 1.0)
        costs = safe(batch_cost(X))
        n_evals += P
        improved = costs < pbest_cost
        pbest_x[improved] = X[improved]
        pbest_cost[improved] = costs[improved]
        g = int(np.argmin(costs))
        if costs[g] < gbest_cost:
            gbest_cost = float(costs[g])
            gbest_x = X[g].copy()
        history.append(gbest_cost)

    return gbest_x, gbest_cost, np.array(history), n_evals


# ---------------------------------------------------------------------------
# grating-lobe suppression objective


def psll_batch_evaluator(geom: ArrayGeometry, coverage_angles: Sequence[float],
                         grid: np.ndarray | None = None,
                         exclusion_factor: float = DEFAULT_EXCLUSION_FACTOR):
    """Vectorized worst-case sidelobe evaluator over a set of steering angles.

    Returns a function mapping an (M, N) mask matrix to an (M, n_angles)
    array of sidelobe levels in dB.  Shares one N x G phase basis across
    angles: steering to angle a multiplies the mask by per-element phases
    rather than shifting the grid.
    """
    if grid is None:
        grid = angle_grid()
    if len(coverage_angles) == 0:
        raise ValueError("coverage set must be non-empty")
    k = geom.wavenumber()
    p = geom.positions
    basis = np.exp(1j * k * np.outer(p, grid))          # N x G
    halfwidth = exclusion_factor * geom.wavelength / geom.aperture_length
    steer = []
    for a in coverage_angles:
        u0 = np.sin(a)
        phase = np.exp(-1j * k * p * u0)                # N
        side = np.abs(grid - u0) >= halfwidth           # G bools
        if not np.any(side):
            raise ValueError("mainlobe exclusion swallowed the whole grid")
        steer.append((phase, side))

    def evaluate(masks: np.ndarray) -> np.ndarray:
        masks = np.atleast_2d(masks).astype(float)
        n_active = masks.sum(axis=1)
        out = np.empty((masks.shape[0], len(steer)))
        for j, (phase, side) in enumerate(steer):
            af = (masks * phase[None, :]) @ basis       # M x G
            power = np.abs(af) ** 2
            peak = np.max(np.where(side[None, :], power, 0.0), axis=1)
            out[:, j] = 10.0 * np.log10(peak / n_active ** 2)
        return out

    return evaluate


def optimize_gta(geom: ArrayGeometry, n_active: int, fixed_set: Sequence[int],
                 coverage_angles: Sequence[float], cfg: SwarmConfig,
                 tau_psll_db: float = -10.0, penalty_weight: float = 10.0,
                 grid: np.ndarray | None = None,
                 exclusion_factor: float = DEFAULT_EXCLUSION_FACTOR) -> SwarmResult:
    """Thinning mask minimizing the worst-case sidelobe level over a sector.

    Cost per mask is ``max_a PSLL(a)`` plus `penalty_weight` times the total
    dB excess over `tau_psll_db` across coverage angles; the penalty keeps
    the search connected when no mask can satisfy the cap.
    """
    fixed = sorted(set(int(i) for i in fixed_set))
    if n_active < len(fixed):
        raise ValueError("n_active smaller than the mandatory set")
    n = geom.n_elements
    variable = np.setdiff1d(np.arange(n), fixed)
    evaluate = psll_batch_evaluator(geom, coverage_angles, grid, exclusion_factor)
    k_free = n_active - len(fixed)

    def masks_from(X: np.ndarray) -> np.ndarray:
        masks = np.zeros((X.shape[0], n), dtype=np.int8)
        rows = np.arange(X.shape[0])[:, None]
        masks[rows, variable[_topk_rows(X, k_free)]] = 1
        masks[:, fixed] = 1
        return masks

    def cost_of_masks(masks: np.ndarray) -> np.ndarray:
        levels = evaluate(masks)
        worst = levels.max(axis=1)
        excess = np.maximum(0.0, levels - tau_psll_db).sum(axis=1)
        return worst + penalty_weight * excess

    cached = _memoized_batch(cost_of_masks)

    def batch_cost(X: np.ndarray) -> np.ndarray:
        return cached(masks_from(X))

    best_x, best_cost, history, n_evals = minimize_swarm(batch_cost, variable.size, cfg)
    best_mask = top_k_binarize(best_x, n_active, fixed, n)
    return SwarmResult(best_mask, None, best_cost, history, cfg, n_evals)


# ---------------------------------------------------------------------------
# sum-rate objectives


def unmasked_channel(geom: ArrayGeometry, users: Sequence[UserLocation],
                     norm_count: int, strict: bool = True) -> np.ndarray:
    "Full N x K channel before masking, for batched mask evaluation."
    full = ThinningVector.full(geom.n_elements)
    return channel_matrix(geom, full, users, norm_count, strict).entries


def _mask_to_sets(variable: np.ndarray, fixed_arr: np.ndarray, k_free: int):
    "Map priority rows to sorted active-index sets (fixed indices included)."

    def convert(X: np.ndarray) -> np.ndarray:
        free = variable[_topk_rows(X, k_free)]
        if fixed_arr.size:
            sets = np.concatenate(
                [np.broadcast_to(fixed_arr, (X.shape[0], fixed_arr.size)), free], axis=1)
        else:
            sets = free
        return np.sort(sets, axis=1)

    return convert


def optimize_sta(geom: ArrayGeometry, n_active: int, fixed_set: Sequence[int],
                 users: Sequence[UserLocation], power: PowerConfig,
                 cfg: SwarmConfig, norm_count: int | None = None,
                 strict: bool = True, per_user_power: bool = False) -> SwarmResult:
    """Thinning mask maximizing the multiuser sum rate for known locations.

    Same engine and update rules as the sidelobe objective; only the cost
    changes (negated sum rate, so lower is better).  The channel is rebuilt
    per candidate mask by gathering active rows of the unmasked channel.
    """
    fixed = sorted(set(int(i) for i in fixed_set))
    if n_active < len(fixed):
        raise ValueError("n_active smaller than the mandatory set")
    n = geom.n_elements
    if norm_count is None:
        norm_count = n_active
    variable = np.setdiff1d(np.arange(n), fixed)
    h_full = unmasked_channel(geom, users, norm_count, strict)
    to_sets = _mask_to_sets(variable, np.array(fixed, dtype=int), n_active - len(fixed))

    cached = _memoized_batch(
        lambda sets: -masked_sum_rates(h_full, sets, power, per_user_power))

    def batch_cost(X: np.ndarray) -> np.ndarray:
        return cached(to_sets(X))

    best_x, best_cost, history, n_evals = minimize_swarm(batch_cost, variable.size, cfg)
    best_mask = top_k_binarize(best_x, n_active, fixed, n)
    return SwarmResult(best_mask, None, best_cost, history, cfg, n_evals)


def optimize_sta_ensemble(geom: ArrayGeometry, n_active: int, fixed_set: Sequence[int],
                          scenarios: Sequence, power: PowerConfig, cfg: SwarmConfig,
                          norm_count: int | None = None, strict: bool = True,
                          per_user_power: bool = False) -> SwarmResult:
    """One mask maximizing the average sum rate over a scenario ensemble.

    Statistical-CSI variant of the per-scenario optimization: the cost of a
    mask is its mean rate across all ensemble members, so the returned mask
    is scenario-independent and can be reused across trials.
    """
    if len(scenarios) == 0:
        raise ValueError("scenario ensemble must be non-empty")
    fixed = sorted(set(int(i) for i in fixed_set))
    if n_active < len(fixed):
        raise ValueError("n_active smaller than the mandatory set")
    n = geom.n_elements
    if norm_count is None:
        norm_count = n_active
    variable = np.setdiff1d(np.arange(n), fixed)
    h_stack = [unmasked_channel(geom, sc.users, norm_count, strict) for sc in scenarios]
    to_sets = _mask_to_sets(variable, np.array(fixed, dtype=int), n_active - len(fixed))

    def mean_rate(sets: np.ndarray) -> np.ndarray:
        acc = np.zeros(sets.shape[0])
        for h in h_stack:
            acc += masked_sum_rates(h, sets, power, per_user_power)
        return acc / len(h_stack)

    cached = _memoized_batch(lambda sets: -mean_rate(sets))

    def batch_cost(X: np.ndarray) -> np.ndarray:
        return cached(to_sets(X))

    best_x, best_cost, history, n_evals = minimize_swarm(batch_cost, variable.size, cfg)
    best_mask = top_k_binarize(best_x, n_active, fixed, n)
    return SwarmResult(best_mask, None, best_cost, history, cfg, n_evals)


def project_min_spacing(positions: np.ndarray, lo: float, hi: float,
                        min_spacing: float) -> np.ndarray:
    """Sort rows and enforce a minimum gap inside [lo, hi].

    Left-to-right sweep pushes elements right to open the gap; a
    right-to-left sweep then pulls any overflow back from the upper bound.
    Feasibility ((count-1)*gap <= hi-lo) must hold.
    """
    pos = np.sort(np.atleast_2d(positions), axis=1)
    n = pos.shape[1]
    for i in range(1, n):
        pos[:, i] = np.maximum(pos[:, i], pos[:, i - 1] + min_spacing)
    pos[:, n - 1] = np.minimum(pos[:, n - 1], hi)
    for i in range(n - 2, -1, -1):
        pos[:, i] = np.minimum(pos[:, i], pos[:, i + 1] - min_spacing)
    return pos if positions.ndim > 1 else pos[0]


def optimize_positions_mula(users: Sequence[UserLocation], n_elements: int,
                            wavelength: float, power: PowerConfig, cfg: SwarmConfig,
                            bounds: tuple | None = None,
                            min_spacing: float | None = None,
                            norm_count: int | None = None,
                            per_user_power: bool = False) -> SwarmResult:
    """Continuous element-position optimization for the sum rate.

    Each particle encodes element coordinates scaled to [0, 1] over the
    movement bounds; every evaluation decodes, sorts, and projects the
    coordinates to respect the minimum spacing before building the array.
    """
    if bounds is None:
        bounds = (-80.0 * wavelength, 80.0 * wavelength)
    if min_spacing is None:
        min_spacing = wavelength / 2.0
    lo, hi = bounds
    if n_elements * min_spacing > hi - lo:
        raise ValueError("bounds too tight for the requested element count")
    if norm_count is None:
        norm_count = n_elements
    k = 2.0 * np.pi / wavelength
    angles = np.array([u.angle for u in users])
    ranges = np.array([u.range_m for u in users])
    betas = np.array([wavelength ** 2 / ((4 * np.pi) ** 2 * r ** 2) for r in ranges])
    amp = np.sqrt(betas / norm_count) * np.exp(-1j * k * ranges)
    sin_a = np.sin(angles)
    cos2_a = np.cos(angles) ** 2

    def decode(X: np.ndarray) -> np.ndarray:
        return project_min_spacing(lo + X * (hi - lo), lo, hi, min_spacing)

    def batch_cost(X: np.ndarray) -> np.ndarray:
        pos = decode(X)
        pos = pos - pos[:, :1]  # responses are translation-invariant
        phase = -k * (pos[:, :, None] * sin_a[None, None, :]
                      - pos[:, :, None] ** 2 * (cos2_a / (2.0 * ranges))[None, None, :])
        h = amp[None, None, :] * np.exp(1j * phase)     # (P, N, K)
        return -batched_sum_rates(h, power, per_user_power)

    best_x, best_cost, history, n_evals = minimize_swarm(batch_cost, n_elements, cfg)
    best_positions = decode(best_x[None, :])[0]
    return SwarmResult(None, best_positions, best_cost, history, cfg, n_evals)
