"""Regularized zero-forcing precoding, SINR, and sum-rate evaluation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arrays import ArrayGeometry, ThinningVector
from .channel import ChannelMatrix, UserLocation, channel_matrix, pathloss


@dataclass(frozen=True)
class PowerConfig:
    """Noise variance, nominal SNR and the total transmit power budget.

    `calibrated` fixes the budget so that a user at the reference pathloss
    would see `snr_db` of received SNR under full-power single-user
    transmission with unit beamforming gain.
    """

    noise_variance: float = 1.0
    snr_db: float = 20.0
    total_power: float = 100.0

    def __post_init__(self):
        if self.noise_variance <= 0:
            raise ValueError("noise variance must be positive")
        if self.total_power <= 0:
            raise ValueError("total power must be positive")

    @classmethod
    def calibrated(cls, snr_db: float, reference_pathloss: float,
                   noise_variance: float = 1.0) -> "PowerConfig":
        if reference_pathloss <= 0:
            raise ValueError("reference pathloss must be positive")
        p = noise_variance * 10.0 ** (snr_db / 10.0) / reference_pathloss
        return cls(noise_variance, snr_db, p)

    @classmethod
    def for_interval(cls, wavelength: float, range_interval: tuple,
                     snr_db: float, noise_variance: float = 1.0) -> "PowerConfig":
        "Calibrate against the midpoint of a range sampling interval."
        r_ref = 0.5 * (range_interval[0] + range_interval[1])
        return cls.calibrated(snr_db, pathloss(wavelength, r_ref), noise_variance)


@dataclass(frozen=True)
class PrecodingMatrix:
    "Per-user beamforming columns (N x K); rows of inactive antennas are zero."

    weights: np.ndarray

    @property
    def n_users(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class RateReport:
    "Per-user SINRs (linear), per-user rates, and their sum in bits/s/Hz."

    per_user_sinr: np.ndarray
    per_user_rate: np.ndarray
    sum_rate: float

    @classmethod
    def from_sinrs(cls, sinrs: np.ndarray) -> "RateReport":
        sinrs = np.asarray(sinrs, dtype=float)
        rates = np.log2(1.0 + sinrs)
        return cls(sinrs, rates, float(rates.sum()))

    def min_sinr_db(self) -> float:
        lo = float(self.per_user_sinr.min())
        return 10.0 * np.log10(lo) if lo > 0 else -np.inf


def regularization(k: int, power: PowerConfig) -> float:
    "MMSE-style diagonal loading K*sigma^2/P."
    return k * power.noise_variance / power.total_power


def rzf_precoder(H: ChannelMatrix, thinning: ThinningVector, power: PowerConfig,
                 alpha: float | None = None, per_user_power: bool = False) -> PrecodingMatrix:
    """Regularized zero-forcing precoder on the active-antenna submatrix.

    Directions are ``H_a (H_a^H H_a + alpha I)^-1`` computed on the rows of
    the active set, scaled by one common factor so the columns exactly meet
    the sum power budget (or per-column to P/K when `per_user_power`), and
    re-embedded with zero rows at inactive antennas.

    Parameters
    ----------
    H : ChannelMatrix
        Channel whose columns are already masked by `thinning`.
    thinning : ThinningVector
        Activation mask; defines which rows may carry power.
    power : PowerConfig
    alpha : float, optional
        Diagonal loading; defaults to K*sigma^2/P.  Any positive value keeps
        the solve well-posed even for co-located users.
    per_user_power : bool
        Scale each column to P/K instead of one common scalar.
    """
    k = H.n_users
    if k == 0:
        raise ValueError("no users to precode")
    active = thinning.active_indices()
    if k > active.size:
        warnings.warn(f"more users ({k}) than active antennas ({active.size})")
    if alpha is None:
        alpha = regularization(k, power)
    Ha = H.entries[active, :]
    gram = Ha.conj().T @ Ha + alpha * np.eye(k)
    # W_a^H = (gram^-1) H_a^H exploits the Hermitian gram
    Wa = np.linalg.solve(gram, Ha.conj().T).conj().T
    if per_user_power:
        norms = np.linalg.norm(Wa, axis=0)
        if np.any(norms == 0):
            raise ValueError("degenerate zero precoding column")
        Wa = Wa * (np.sqrt(power.total_power / k) / norms)
    else:
        total = np.sum(np.abs(Wa) ** 2)
        if total == 0:
            raise ValueError("degenerate zero precoder")
        Wa = Wa * np.sqrt(power.total_power / total)
    W = np.zeros((H.n_antennas, k), dtype=complex)
    W[active, :] = Wa
    return PrecodingMatrix(W)


def sinr(H: ChannelMatrix, W: PrecodingMatrix, power: PowerConfig) -> np.ndarray:
    "Per-user SINR: |w_k^H h_k|^2 over noise plus sum_{j!=k} |w_j^H h_k|^2."
    if W.weights.shape[0] != H.entries.shape[0] or W.n_users != H.n_users:
        raise ValueError("channel/precoder shape mismatch")
    X = W.weights.conj().T @ H.entries          # X[j, k] = w_j^H h_k
    P = np.abs(X) ** 2
    signal = np.diag(P)
    interference = P.sum(axis=0) - signal
    return signal / (power.noise_variance + interference)


def sum_rate(sinrs: Sequence[float]) -> float:
    "Sum of log2(1 + SINR_k) in bits/s/Hz."
    g = np.asarray(sinrs, dtype=float)
    if np.any(g < 0):
        raise ValueError("SINR values must be non-negative")
    return float(np.log2(1.0 + g).sum())


def evaluate_rates(geom: ArrayGeometry, thinning: ThinningVector,
                   users: Sequence[UserLocation], power: PowerConfig,
                   norm_count: int | None = None, strict: bool = True,
                   per_user_power: bool = False) -> RateReport:
    "Channel -> RZF -> SINR -> rates for one array configuration."
    H = channel_matrix(geom, thinning, users, norm_count, strict)
    W = rzf_precoder(H, thinning, power, per_user_power=per_user_power)
    return RateReport.from_sinrs(sinr(H, W, power))


def batched_sum_rates(channels: np.ndarray, power: PowerConfig,
                      per_user_power: bool = False) -> np.ndarray:
    """RZF sum rates for a stack of channels, one K x K solve per entry.

    `channels` has shape (M, N_a, K): M independent channel realizations
    over the same K users.  Returns an (M,) array of sum rates.
    """
    Hb = np.asarray(channels)
    if Hb.ndim == 2:
        Hb = Hb[None, :, :]
    k = Hb.shape[2]
    alpha = regularization(k, power)
    gram = np.einsum("mik,mil->mkl", Hb.conj(), Hb)  # (M, K, K)
    gram += alpha * np.eye(k)
    Wb = np.linalg.solve(gram, np.swapaxes(Hb.conj(), 1, 2))  # (M, K, N_a) = W^H
    if per_user_power:
        norms = np.sqrt(np.sum(np.abs(Wb) ** 2, axis=2))      # (M, K)
        Wb = Wb * (np.sqrt(power.total_power / k) / norms)[:, :, None]
        X = np.einsum("mkn,mnl->mkl", Wb, Hb)
        P = np.abs(X) ** 2
    else:
        scale2 = power.total_power / np.sum(np.abs(Wb) ** 2, axis=(1, 2))
        X = np.einsum("mkn,mnl->mkl", Wb, Hb)        # X[m, j, k] = w_j^H h_k
        P = np.abs(X) ** 2 * scale2[:, None, None]
    sig = np.einsum("mkk->mk", P)
    interf = P.sum(axis=1) - sig
    gamma = sig / (power.noise_variance + interf)
    return np.log2(1.0 + gamma).sum(axis=1)


def masked_sum_rates(h_full: np.ndarray, active_sets: np.ndarray,
                     power: PowerConfig, per_user_power: bool = False) -> np.ndarray:
    """Sum rates of many activation patterns against one channel, batched.

    `h_full` is the unmasked N x K channel (already scaled by pathloss and
    normalization); `active_sets` is an (M, N_T) integer array of active-row
    index sets.  Only active rows enter the RZF solve, so gathering them is
    equivalent to masking.  Returns an (M,) array of sum rates.
    """
    active_sets = np.asarray(active_sets)
    if active_sets.ndim == 1:
        active_sets = active_sets[None, :]
    return batched_sum_rates(h_full[active_sets, :], power, per_user_power)
