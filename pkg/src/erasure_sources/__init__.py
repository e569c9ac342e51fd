"""Imperfect randomness with detectable erasures: source model, adversaries, quantum reduction."""

from .prob_core import Channel, FiniteDistribution, l1_distance, min_entropy, shannon_entropy
from .source_model import (
    BOTTOM,
    AdaptiveSource,
    ChannelFamily,
    ErasureAlphabet,
    enumerate_joint,
    in_perturbation_set,
    is_delta_source,
    is_sv_source,
    sample,
)

__version__ = "0.1.0"
