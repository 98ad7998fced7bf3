"""Monte Carlo outage estimation with reproducible parallel streams.

Trials are cut into fixed-size streams. Stream ``i`` draws from a PCG64
generator seeded by ``SeedSequence(seed, spawn_key=(i,))``, so each stream's
draws depend only on ``(seed, i)``. Per-stream tallies are combined in stream
order, which makes the result identical for any number of workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..dmt import noisy_feedback_exponents
from .protocols import ProtocolKind, TrialConfig, power_ladder, run_block

STREAM_SIZE = 1 << 16


@dataclass(frozen=True)
class OutageEstimate:
    outage_probability: float
    ci_low: float
    ci_high: float
    trials: int
    outage_count: int
    mean_power_ratio: float
    mean_feedback_power_ratio: float = 0.0


def stream_generator(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def clopper_pearson(count: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Exact binomial confidence interval."""
    tail = 0.5 * (1.0 - confidence)
    lo = 0.0 if count == 0 else float(stats.beta.ppf(tail, count, trials - count + 1))
    hi = 1.0 if count == trials else float(stats.beta.ppf(1.0 - tail, count + 1, trials - count))
    return lo, hi


def _run_stream(args) -> tuple[int, float, float]:
    tc, index, size, ladder, q = args
    res = run_block(tc, stream_generator(tc.seed, index), size, ladder=ladder, q=q)
    return int(np.count_nonzero(res.outage)), float(np.sum(res.data_power)), float(np.sum(res.feedback_power))


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("DMTLAB_WORKERS", "1"))
    if workers < 1:
        raise ValueError(f"workers must be a positive integer, got {workers}")
    return workers


def estimate_outage(tc: TrialConfig, workers: int | None = None) -> OutageEstimate:
    """Outage probability of ``tc.protocol`` at one SNR, with a 95% Clopper-Pearson interval.

    ``mean_power_ratio`` is the average data power divided by the SNR.
    """
    workers = resolve_workers(workers)
    ladder = power_ladder(tc.r, tc.protocol.K, tc.cfg)
    q = None
    if tc.protocol.kind is ProtocolKind.NOISY_QUANTIZED_FDD:
        q = noisy_feedback_exponents(tc.r, tc.protocol.K, tc.cfg)

    n_streams = -(-tc.trials // STREAM_SIZE)
    jobs = [
        (tc, i, min(STREAM_SIZE, tc.trials - i * STREAM_SIZE), ladder, q)
        for i in range(n_streams)
    ]
    if workers == 1 or n_streams == 1:
        results = [_run_stream(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_stream, jobs))

    count = sum(c for c, _, _ in results)
    data_power = math.fsum(p for _, p, _ in results)
    fb_power = math.fsum(f for _, _, f in results)
    lo, hi = clopper_pearson(count, tc.trials)
    snr = tc.snr
    return OutageEstimate(
        outage_probability=count / tc.trials,
        ci_low=lo,
        ci_high=hi,
        trials=tc.trials,
        outage_count=count,
        mean_power_ratio=data_power / tc.trials / snr,
        mean_feedback_power_ratio=fb_power / tc.trials / snr,
    )
