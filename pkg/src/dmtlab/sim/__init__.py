"""Monte Carlo outage simulation of the power-controlled feedback protocols."""

from .channel import ChannelSample, complex_gaussian, mutual_information, outage_event, sample_channel
from .engine import OutageEstimate, clopper_pearson, estimate_outage, stream_generator
from .fit import SlopeFit, fit_diversity
from .protocols import (
    Protocol,
    ProtocolKind,
    TrialConfig,
    noisy_feedback_decode,
    power_ladder,
    run_protocol_trial,
    select_feedback_index,
)

__all__ = [
    "ChannelSample",
    "OutageEstimate",
    "Protocol",
    "ProtocolKind",
    "SlopeFit",
    "TrialConfig",
    "clopper_pearson",
    "complex_gaussian",
    "estimate_outage",
    "fit_diversity",
    "mutual_information",
    "noisy_feedback_decode",
    "outage_event",
    "power_ladder",
    "run_protocol_trial",
    "sample_channel",
    "select_feedback_index",
    "stream_generator",
]
