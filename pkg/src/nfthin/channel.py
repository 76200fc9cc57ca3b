"""Free-space LoS near-field channels and random user scenarios."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arrays import ArrayGeometry, FocusPoint, ThinningVector, steering_vector


class RangeValidityWarning(UserWarning):
    "A user range fell inside the quadratic-model exclusion zone (r <= 2D)."


def pathloss(wavelength: float, range_m: float) -> float:
    "Free-space power pathloss wl^2 / ((4*pi)^2 * r^2)."
    if range_m <= 0:
        raise ValueError("range must be positive")
    return wavelength ** 2 / ((4.0 * np.pi) ** 2 * range_m ** 2)


@dataclass(frozen=True)
class UserLocation:
    "Polar user coordinates: angle from boresight (rad), range (m)."

    angle: float
    range_m: float

    def __post_init__(self):
        if abs(self.angle) >= np.pi / 2:
            raise ValueError("user angle must lie strictly inside (-pi/2, pi/2)")
        if self.range_m <= 0:
            raise ValueError("user range must be positive")

    def as_focus(self) -> FocusPoint:
        return FocusPoint(self.angle, self.range_m)


@dataclass(frozen=True)
class Scenario:
    "A fixed set of user locations together with the seed that produced it."

    users: tuple
    seed: int

    @property
    def k(self) -> int:
        return len(self.users)

    def angles(self) -> np.ndarray:
        return np.array([u.angle for u in self.users])

    def ranges(self) -> np.ndarray:
        return np.array([u.range_m for u in self.users])


@dataclass(frozen=True)
class ChannelMatrix:
    "Stacked per-user channel columns (N x K) plus the per-user pathlosses."

    entries: np.ndarray
    pathlosses: np.ndarray

    @property
    def n_antennas(self) -> int:
        return self.entries.shape[0]

    @property
    def n_users(self) -> int:
        return self.entries.shape[1]


def channel_vector(geom: ArrayGeometry, thinning: ThinningVector, user: UserLocation,
                   norm_count: int | None = None, strict: bool = True) -> np.ndarray:
    """Channel column sqrt(pathloss) * exp(-j*2*pi*r/wl) * (mask (*) response).

    The global propagation phase cancels in every squared-magnitude metric
    but is kept so the column matches the physical model exactly.  With the
    default normalization the squared column norm equals
    ``pathloss * active_count / n_elements``.
    """
    if user.range_m <= geom.min_valid_range:
        msg = (f"user range {user.range_m:.3f} m is inside the model validity "
               f"bound 2D = {geom.min_valid_range:.3f} m")
        if strict:
            raise ValueError(msg)
        warnings.warn(msg, RangeValidityWarning)
    a = steering_vector(geom, user.as_focus(), norm_count)
    beta = pathloss(geom.wavelength, user.range_m)
    global_phase = np.exp(-1j * geom.wavenumber() * user.range_m)
    return np.sqrt(beta) * global_phase * (thinning.mask * a)


def channel_matrix(geom: ArrayGeometry, thinning: ThinningVector,
                   users: Sequence[UserLocation], norm_count: int | None = None,
                   strict: bool = True) -> ChannelMatrix:
    "Assemble the N x K channel from per-user columns."
    if len(users) < 1:
        raise ValueError("need at least one user")
    cols = [channel_vector(geom, thinning, u, norm_count, strict) for u in users]
    betas = np.array([pathloss(geom.wavelength, u.range_m) for u in users])
    return ChannelMatrix(np.column_stack(cols), betas)


def make_rng(*entropy: int) -> np.random.Generator:
    "Deterministic PCG64 generator keyed on a tuple of integers."
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def trial_seed(master_seed: int, *keys: int) -> int:
    "Derive a 63-bit child seed from a master seed and index keys."
    ss = np.random.SeedSequence((master_seed,) + keys)
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


def sample_scenario(k: int, range_interval: tuple, angle_interval: tuple,
                    seed: int) -> Scenario:
    """Draw k users i.i.d. uniformly over [r_min, r_max] x [a_min, a_max].

    Ranges are drawn before angles so a given seed always produces the same
    scenario.  Degenerate intervals (min == max) are allowed.
    """
    r_min, r_max = range_interval
    a_min, a_max = angle_interval
    if k < 1:
        raise ValueError("need k >= 1 users")
    if r_min > r_max or a_min > a_max:
        raise ValueError("empty sampling interval")
    rng = make_rng(seed)
    ranges = r_min + (r_max - r_min) * rng.random(k)
    angles = a_min + (a_max - a_min) * rng.random(k)
    users = tuple(UserLocation(float(a), float(r)) for a, r in zip(angles, ranges))
    return Scenario(users, seed)


def default_range_interval(geom: ArrayGeometry) -> tuple:
    "Sampling bounds (2D, R_D/7): model validity up to the boresight focus limit."
    return (geom.min_valid_range, geom.rayleigh_distance / 7.0)


def scenario_to_csv(scenario: Scenario, path) -> None:
    "Write (user_id, theta_rad, range_m) rows; floats at 17 significant digits."
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["user_id", "theta_rad", "range_m"])
        for i, u in enumerate(scenario.users):
            w.writerow([i, f"{u.angle:.17g}", f"{u.range_m:.17g}"])


def scenario_from_csv(path, seed: int = 0) -> Scenario:
    "Read a scenario written by `scenario_to_csv`; round-trips exactly."
    users = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            users.append(UserLocation(float(row["theta_rad"]), float(row["range_m"])))
    if not users:
        raise ValueError(f"no users found in {path}")
    return Scenario(tuple(users), seed)
