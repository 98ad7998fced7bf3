"""Diversity-multiplexing tradeoff curves for MIMO links with quantized or
training-based feedback, plus Monte Carlo outage checks."""

from .curves import curve
from .dmt import (
    UNBOUNDED,
    AntennaConfig,
    CaseKind,
    FeedbackCase,
    OverheadConfig,
    b_star,
    d_case,
    d_noisy_oracle,
    d_noisy_quantized,
    effective_multiplexing,
    g_closed,
    g_oracle,
)
from .piecewise import PiecewiseLinearCurve

__version__ = "0.1.0"

__all__ = [
    "UNBOUNDED",
    "AntennaConfig",
    "CaseKind",
    "FeedbackCase",
    "OverheadConfig",
    "PiecewiseLinearCurve",
    "b_star",
    "curve",
    "d_case",
    "d_noisy_oracle",
    "d_noisy_quantized",
    "effective_multiplexing",
    "g_closed",
    "g_oracle",
]
