"""Power-controlled feedback protocols, one fading block at a time.

All protocols assume the receiver knows the forward channel exactly. The
receiver picks the lowest rung of the power ladder that avoids outage and
signals it back; the transmitter sends data at the rung it decodes.

Feedback decoding is an energy detector: the received energy is mapped to
a power exponent on the log-SNR scale and compared against the midpoints
between consecutive signalled exponents. It stands in for a MAP decoder; the
exponent-level decisions are what set the diversity order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..dmt import AntennaConfig, _check_r, b_star, noisy_feedback_exponents
from ..errors import DomainError
from .channel import ChannelSample, channel_eigenvalues, complex_gaussian, rate_at_power


class ProtocolKind(str, enum.Enum):
    NO_FEEDBACK_CSIR = "no-feedback-csir"
    PERFECT_QUANTIZED = "perfect-quantized"
    NOISY_QUANTIZED_FDD = "noisy-quantized-fdd"
    TDD_NOISY_TRAINING = "tdd-noisy-training"


_PROTOCOL_MIN_K = {
    ProtocolKind.NO_FEEDBACK_CSIR: 1,
    ProtocolKind.PERFECT_QUANTIZED: 1,
    ProtocolKind.NOISY_QUANTIZED_FDD: 2,
    ProtocolKind.TDD_NOISY_TRAINING: 2,
}


@dataclass(frozen=True)
class Protocol:
    kind: ProtocolKind
    K: int = 1

    def __post_init__(self):
        kind = ProtocolKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ProtocolKind.NO_FEEDBACK_CSIR:
            object.__setattr__(self, "K", 1)
        elif self.K < _PROTOCOL_MIN_K[kind]:
            raise DomainError(f"protocol {kind.value} needs K >= {_PROTOCOL_MIN_K[kind]}, got K={self.K}")

    @classmethod
    def parse(cls, name: str, K: int | None = None) -> Protocol:
        try:
            kind = ProtocolKind(name)
        except ValueError:
            known = ", ".join(k.value for k in ProtocolKind)
            raise ValueError(f"unknown protocol {name!r}; expected one of: {known}") from None
        return cls(kind, 1 if K is None else K)

    @property
    def name(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class TrialConfig:
    cfg: AntennaConfig
    r: float
    snr_db: float
    protocol: Protocol
    trials: int
    seed: int = 0

    def __post_init__(self):
        _check_r(self.r, self.cfg)
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if not math.isfinite(self.snr_db):
            raise DomainError(f"snr_db must be finite, got {self.snr_db}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def snr(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)


def power_ladder(r: float, K: int, cfg: AntennaConfig) -> list[float]:
    """Data power exponents ``1 + B_j(r)`` for ``j = 0..K-1``."""
    if K < 1:
        raise DomainError(f"power ladder needs K >= 1, got K={K}")
    return [1.0 + b_star(r, j, cfg) for j in range(K)]


def tdd_training_offsets(K: int) -> list[float]:
    """Exponents ``(i+1)/(2K)`` the transmitter sees for TDD training level ``i``."""
    return [(i + 1) / (2.0 * K) for i in range(K)]


def level_outages(eigenvalues: np.ndarray, ladder, r: float, snr: float, m: int) -> np.ndarray:
    """Outage indicator at every ladder rung; shape ``eigenvalues.shape[:-1] + (K,)``."""
    target = r * math.log2(snr)
    cols = [rate_at_power(eigenvalues, snr**p, m) < target for p in ladder]
    return np.stack(cols, axis=-1)


def first_clear_level(outages: np.ndarray) -> np.ndarray:
    """Lowest rung out of outage, or the top rung when every rung fails."""
    K = outages.shape[-1]
    return np.where(outages.all(axis=-1), K - 1, np.argmin(outages, axis=-1))


def select_feedback_index(H, ladder, r: float, snr: float, cfg: AntennaConfig) -> int:
    """Feedback index the receiver requests for one channel realisation."""
    if len(ladder) == 0:
        raise DomainError("ladder must be nonempty")
    H = H.H if isinstance(H, ChannelSample) else np.asarray(H)
    lam = channel_eigenvalues(H)
    return int(first_clear_level(level_outages(lam, ladder, r, snr, cfg.m)))


def decode_level(statistic, exponents, snr: float):
    """Map a normalized received energy to a level index by midpoint thresholds in log-SNR."""
    mids = 0.5 * (np.asarray(exponents[:-1]) + np.asarray(exponents[1:]))
    with np.errstate(divide="ignore"):
        level = np.log(np.asarray(statistic, dtype=float)) / math.log(snr)
    return np.searchsorted(mids, level, side="left")


def fdd_feedback_statistic(power, Hf: np.ndarray, noise: np.ndarray) -> np.ndarray:
    """Energy detector for one orthogonal pilot per feedback antenna.

    Over n channel uses the receiver excites each of its n antennas in turn at
    ``power``; the transmitter sees ``sqrt(power) * Hf + noise`` (m x n per
    block), removes the unit noise floor and normalizes by ``m*n``.
    """
    power = np.asarray(power, dtype=float)
    mn = Hf.shape[-1] * Hf.shape[-2]
    y = np.sqrt(power)[..., None, None] * Hf + noise
    return np.clip(np.sum(np.abs(y) ** 2, axis=(-2, -1)) - mn, 0.0, None) / mn


def tdd_feedback_statistic(offset_exponent, H: np.ndarray, noise: np.ndarray, snr: float):
    """Received energy of the beamformed TDD training symbol.

    The receiver sends along the dominant left singular vector of ``H`` at
    ``snr**(alpha_min + offset)`` with ``alpha_min = -log(lambda_max)/log(snr)``,
    so the noiseless received energy is exactly ``snr**offset``. Returns the
    received energy above the noise floor (m) and the training power spent.
    """
    lam, vecs = np.linalg.eigh(H @ np.conj(np.swapaxes(H, -1, -2)))
    lam_max = np.clip(lam[..., -1], 0.0, None)
    u = vecs[..., :, -1]
    with np.errstate(divide="ignore"):
        alpha_min = -np.log(lam_max) / math.log(snr)
        power = snr ** (alpha_min + np.asarray(offset_exponent, dtype=float))
    # H^dagger u: the signal as seen through the reverse channel.
    through = np.einsum("...nm,...n->...m", np.conj(H), u)
    with np.errstate(invalid="ignore"):
        signal = np.where(lam_max[..., None] > 0.0, np.sqrt(power)[..., None] * through, 0.0)
    y = signal + noise
    floor = H.shape[-1]
    return np.clip(np.sum(np.abs(y) ** 2, axis=-1) - floor, 0.0, None), power


def noisy_feedback_decode(j_true: int, exponents, Hf, snr: float, rng: np.random.Generator, tdd: bool = False) -> int:
    """Send feedback level ``j_true`` over one noisy reverse-link use and decode it.

    FDD: pilots at ``snr**exponents[j_true]`` through the independent ``Hf``
    (m x n). TDD: ``Hf`` is ``H^dagger`` and ``exponents`` are the training
    offsets of :func:`tdd_training_offsets`; the power carries the
    ``alpha_min`` pre-compensation. Zero received energy decodes to level 0.
    """
    exponents = list(exponents)
    if not 0 <= j_true < len(exponents):
        raise DomainError(f"j_true={j_true} outside 0..{len(exponents) - 1}")
    if np.any(np.diff(exponents) <= 0):
        raise DomainError("feedback exponents must be strictly increasing")
    Hf = np.asarray(Hf.Hf if isinstance(Hf, ChannelSample) else Hf, dtype=complex)
    if tdd:
        H = np.conj(Hf.T)
        noise = complex_gaussian(rng, (Hf.shape[0],))
        stat, _ = tdd_feedback_statistic(exponents[j_true], H, noise, snr)
    else:
        noise = complex_gaussian(rng, Hf.shape)
        stat = fdd_feedback_statistic(snr ** exponents[j_true], Hf, noise)
    return int(decode_level(stat, exponents, snr))


@dataclass
class BlockResult:
    outage: np.ndarray
    data_power: np.ndarray
    feedback_power: np.ndarray


def run_block(tc: TrialConfig, rng: np.random.Generator, size: int, ladder=None, q=None) -> BlockResult:
    """Run ``size`` independent fading blocks of ``tc.protocol``.

    The forward channel is always drawn first so that protocols sharing a
    seed see the same forward channels.
    """
    cfg, snr, K = tc.cfg, tc.snr, tc.protocol.K
    kind = tc.protocol.kind
    if ladder is None:
        ladder = power_ladder(tc.r, K, cfg)
    H = complex_gaussian(rng, (size, cfg.n, cfg.m))
    lam = channel_eigenvalues(H)
    outages = level_outages(lam, ladder, tc.r, snr, cfg.m)
    j_req = first_clear_level(outages)
    feedback_power = np.zeros(size)

    if kind in (ProtocolKind.NO_FEEDBACK_CSIR, ProtocolKind.PERFECT_QUANTIZED):
        j_tx = j_req
    elif kind is ProtocolKind.NOISY_QUANTIZED_FDD:
        if q is None:
            q = noisy_feedback_exponents(tc.r, K, cfg)
        Hf = complex_gaussian(rng, (size, cfg.m, cfg.n))
        noise = complex_gaussian(rng, (size, cfg.m, cfg.n))
        feedback_power = snr ** np.asarray(q)[j_req]
        j_tx = decode_level(fdd_feedback_statistic(feedback_power, Hf, noise), q, snr)
    else:
        offsets = tdd_training_offsets(K)
        noise = complex_gaussian(rng, (size, cfg.m))
        stat, feedback_power = tdd_feedback_statistic(np.asarray(offsets)[j_req], H, noise, snr)
        j_tx = decode_level(stat, offsets, snr)

    rows = np.arange(size)
    return BlockResult(
        outage=outages[rows, j_tx],
        data_power=snr ** np.asarray(ladder)[j_tx],
        feedback_power=feedback_power,
    )


def run_protocol_trial(tc: TrialConfig, rng: np.random.Generator) -> tuple[bool, float]:
    """One fading block: (outage indicator, linear data power)."""
    res = run_block(tc, rng, 1)
    return bool(res.outage[0]), float(res.data_power[0])
