"""Linear array geometries, thinning masks, and near-field array responses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

SPEED_OF_LIGHT = 299792458.0
"Speed of light in m/s."


def wavelength_from_carrier(carrier_hz: float) -> float:
    "Free-space wavelength in meters for a carrier frequency in Hz."
    if carrier_hz <= 0:
        raise ValueError("carrier frequency must be positive")
    return SPEED_OF_LIGHT / carrier_hz


@dataclass(frozen=True)
class ArrayGeometry:
    """Element coordinates of a linear array along one axis.

    Positions are re-anchored on construction so the first element sits at
    coordinate 0; responses only depend on relative element offsets, which
    makes every derived gain translation-invariant.
    """

    wavelength: float
    positions: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 1 or pos.size < 2:
            raise ValueError("need at least two element positions on one axis")
        if not np.all(np.diff(pos) > 0):
            raise ValueError("element positions must be strictly increasing")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        pos = pos - pos[0]
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @classmethod
    def uniform(cls, wavelength: float, n_elements: int, spacing: float) -> "ArrayGeometry":
        "Uniform line of `n_elements` with the given inter-element spacing (m)."
        if n_elements < 2:
            raise ValueError("a linear array needs at least 2 elements")
        if spacing <= 0:
            raise ValueError("spacing must be positive")
        return cls(wavelength, np.arange(n_elements) * spacing)

    @property
    def n_elements(self) -> int:
        return int(self.positions.size)

    @property
    def aperture_length(self) -> float:
        "Total aperture D in meters (distance between edge elements)."
        return float(self.positions[-1] - self.positions[0])

    @property
    def rayleigh_distance(self) -> float:
        "Near/far-field boundary 2*D^2/wavelength in meters."
        D = self.aperture_length
        return 2.0 * D * D / self.wavelength

    @property
    def min_valid_range(self) -> float:
        "Smallest range (2*D) where the quadratic phase model is trusted."
        return 2.0 * self.aperture_length

    def wavenumber(self) -> float:
        return 2.0 * np.pi / self.wavelength


@dataclass(frozen=True)
class FocusPoint:
    """Polar focus coordinates: angle from boresight (rad) and range (m).

    Endfire (|angle| == pi/2) is accepted for pattern analysis even though
    user locations are kept strictly inside the open sector.
    """

    angle: float
    range_m: float

    def __post_init__(self):
        if abs(self.angle) > np.pi / 2:
            raise ValueError("focus angle must satisfy |angle| <= pi/2")
        if self.range_m <= 0:
            raise ValueError("focus range must be positive")


@dataclass(frozen=True)
class ThinningVector:
    """Binary element-activation mask with a set of mandatory-active indices."""

    mask: np.ndarray
    fixed_set: frozenset = frozenset()

    def __post_init__(self):
        m = np.asarray(self.mask)
        if m.ndim != 1:
            raise ValueError("mask must be one-dimensional")
        if not np.all((m == 0) | (m == 1)):
            raise ValueError("mask entries must be 0 or 1")
        m = m.astype(np.int8)
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)
        fixed = frozenset(int(i) for i in self.fixed_set)
        for i in fixed:
            if i < 0 or i >= m.size:
                raise ValueError(f"fixed index {i} outside [0, {m.size})")
            if m[i] != 1:
                raise ValueError(f"fixed element {i} is not active in the mask")
        object.__setattr__(self, "fixed_set", fixed)

    @classmethod
    def full(cls, n: int) -> "ThinningVector":
        "All-active mask of length n."
        return cls(np.ones(n, dtype=np.int8))

    @classmethod
    def from_active_indices(cls, n: int, active: Iterable[int],
                            fixed_set: Iterable[int] = ()) -> "ThinningVector":
        mask = np.zeros(n, dtype=np.int8)
        mask[list(active)] = 1
        return cls(mask, frozenset(fixed_set))

    @classmethod
    def from_bitstring(cls, bits: str, fixed_set: Iterable[int] = ()) -> "ThinningVector":
        "Parse '1011...' where the first character is element 0."
        return cls(np.array([int(c) for c in bits], dtype=np.int8), frozenset(fixed_set))

    def to_bitstring(self) -> str:
        "Serialize to '1011...' with element 0 first."
        return "".join(str(int(b)) for b in self.mask)

    @property
    def n_elements(self) -> int:
        return int(self.mask.size)

    def active_count(self) -> int:
        return int(self.mask.sum())

    def active_indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def thinning_ratio(self) -> float:
        return self.active_count() / self.n_elements


def steering_vector(geom: ArrayGeometry, focus: FocusPoint,
                    norm_count: int | None = None) -> np.ndarray:
    """Near-field array response vector for a focus point.

    Entry n is ``exp(-j*(2*pi/wl) * (p_n*sin(a) - p_n^2*cos(a)^2/(2*r))) /
    sqrt(norm_count)`` with p_n the element coordinate: a linear term that
    steers in angle plus a quadratic term that focuses in range.  Valid for
    ranges beyond twice the aperture (``geom.min_valid_range``).

    Parameters
    ----------
    geom : ArrayGeometry
    focus : FocusPoint
        Angle from boresight and range of the focus.
    norm_count : int, optional
        Divisor under the square root.  Defaults to the element count of
        `geom`; pass the active-element count instead when gains are to be
        normalized per active element.
    """
    if norm_count is None:
        norm_count = geom.n_elements
    if norm_count < 1:
        raise ValueError("norm_count must be >= 1")
    if focus.range_m <= 0:
        raise ValueError("focus range must be positive")
    p = geom.positions
    cos2 = np.cos(focus.angle) ** 2
    phase = -geom.wavenumber() * (p * np.sin(focus.angle)
                                  - p * p * cos2 / (2.0 * focus.range_m))
    return np.exp(1j * phase) / np.sqrt(norm_count)


def apply_thinning(v: np.ndarray, thinning: ThinningVector) -> np.ndarray:
    "Element-wise product of a response vector with a binary mask."
    if v.shape[0] != thinning.n_elements:
        raise ValueError(
            f"length mismatch: vector has {v.shape[0]} entries, "
            f"mask has {thinning.n_elements}")
    return v * thinning.mask
