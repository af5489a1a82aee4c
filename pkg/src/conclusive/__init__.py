"""Exact simulation of teleportation and three-party secret sharing over
pure, possibly non-maximally entangled channels."""

from .analysis import (
    PROTOCOLS,
    OutcomeDistribution,
    SampleStats,
    bit_report,
    enumerate_protocol,
    monte_carlo,
    run_protocol,
    success_probability,
)
from .params import ChannelSpec, InputQubit
from .protocols import mh_teleport, qact1_teleport, qact2_teleport, standard_teleport
from .secretshare import css1, css2, css3, hbb_secret_share

__all__ = [
    "PROTOCOLS",
    "ChannelSpec",
    "InputQubit",
    "OutcomeDistribution",
    "SampleStats",
    "bit_report",
    "css1",
    "css2",
    "css3",
    "enumerate_protocol",
    "hbb_secret_share",
    "mh_teleport",
    "monte_carlo",
    "qact1_teleport",
    "qact2_teleport",
    "run_protocol",
    "standard_teleport",
    "success_probability",
]
