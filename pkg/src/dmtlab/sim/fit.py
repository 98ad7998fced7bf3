"""Log-log slope fits of outage probability against SNR."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import InsufficientDataError

MIN_OUTAGES = 50


@dataclass(frozen=True)
class SlopeFit:
    diversity_estimate: float
    stderr: float
    points: tuple[tuple[float, float], ...]

    def interval(self, confidence: float = 0.95) -> tuple[float, float]:
        """Student-t interval on the diversity estimate."""
        dof = len(self.points) - 2
        if dof < 1:
            return (-math.inf, math.inf)
        half = float(stats.t.ppf(0.5 + 0.5 * confidence, dof)) * self.stderr
        return self.diversity_estimate - half, self.diversity_estimate + half


def fit_diversity(points) -> SlopeFit:
    """Fit ``log10 P_out = c - d * log10 snr`` by ordinary least squares.

    ``points`` is a sequence of ``(snr_db, OutageEstimate)``. Points with
    fewer than 50 outage events are dropped before fitting.

    Raises:
        InsufficientDataError: if fewer than three points survive the filter.
    """
    usable = [(float(db), est.outage_count / est.trials) for db, est in points if est.outage_count >= MIN_OUTAGES]
    if len(usable) < 3:
        raise InsufficientDataError(
            f"need >= 3 SNR points with >= {MIN_OUTAGES} outages, got {len(usable)}"
        )
    x = np.array([db / 10.0 for db, _ in usable])
    y = np.log10([p for _, p in usable])
    res = stats.linregress(x, y)
    return SlopeFit(diversity_estimate=-float(res.slope), stderr=float(res.stderr), points=tuple(usable))
