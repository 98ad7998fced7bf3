"""Rayleigh block-fading channels and the outage test."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dmt import AntennaConfig
from ..errors import DomainError


@dataclass(frozen=True, eq=False)
class ChannelSample:
    """One fading block.

    ``H`` is the n x m forward channel. ``Hf`` is the m x n feedback channel:
    an independent draw for FDD, ``H`` conjugate-transposed for TDD, or None
    when the protocol has no reverse link.
    """

    H: np.ndarray
    Hf: np.ndarray | None = None


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. CN(0, 1) entries: real and imaginary parts each of variance 1/2."""
    z = rng.standard_normal((*shape, 2))
    return (z[..., 0] + 1j * z[..., 1]) * math.sqrt(0.5)


def sample_channel(cfg: AntennaConfig, rng: np.random.Generator, duplex: str | None = None) -> ChannelSample:
    H = complex_gaussian(rng, (cfg.n, cfg.m))
    if duplex is None:
        return ChannelSample(H)
    if duplex == "fdd":
        return ChannelSample(H, complex_gaussian(rng, (cfg.m, cfg.n)))
    if duplex == "tdd":
        return ChannelSample(H, H.conj().T)
    raise ValueError(f"duplex must be None, 'fdd' or 'tdd', got {duplex!r}")


def _as_matrix(H) -> np.ndarray:
    return np.asarray(H.H if isinstance(H, ChannelSample) else H, dtype=complex)


def channel_eigenvalues(H: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``H H^dagger`` restricted to the min(m,n) that can be nonzero.

    Accepts a single n x m matrix or a stack of shape (..., n, m).
    """
    H = np.asarray(H)
    n, m = H.shape[-2:]
    if m == 1 and n == 1:
        return np.abs(H[..., 0, :]) ** 2
    Hh = np.conj(np.swapaxes(H, -1, -2))
    gram = Hh @ H if m <= n else H @ Hh
    return np.clip(np.linalg.eigvalsh(gram), 0.0, None)


def rate_at_power(eigenvalues: np.ndarray, power, m: int) -> np.ndarray:
    """``log2 det(I + (power/m) H H^dagger)`` from the channel eigenvalues."""
    power = np.asarray(power, dtype=float)
    return np.sum(np.log1p((power[..., None] / m) * eigenvalues), axis=-1) / math.log(2.0)


def mutual_information(H, power: float, cfg: AntennaConfig) -> float:
    """Bits per channel use with ``power`` split evenly over the m transmit antennas."""
    if not power > 0:
        raise DomainError(f"power must be positive, got {power}")
    lam = channel_eigenvalues(_as_matrix(H))
    return float(rate_at_power(lam, power, cfg.m))


def outage_event(H, power_exponent: float, r: float, snr: float, cfg: AntennaConfig) -> bool:
    """True when transmitting at ``snr**power_exponent`` cannot carry ``r log2(snr)`` bits."""
    if not snr > 1.0:
        raise DomainError(f"snr must exceed 1 (linear), got {snr}")
    return mutual_information(H, snr**power_exponent, cfg) < r * math.log2(snr)
