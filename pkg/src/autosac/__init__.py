"""autosac: soft actor-critic with automatic temperature adjustment.

A small, fully self-contained reinforcement-learning engine: hand-written
MLP/Adam numerics, a tanh-squashed Gaussian policy, twin soft Q critics,
entropy-constrained dual temperature updates, deterministic desk-scale
environments, a tabular soft-value-iteration oracle, and an asynchronous
actor / reward-labeler / learner training system.
"""

from autosac.net import (
    AdamState,
    GradientBundle,
    NetworkParams,
    adam_init,
    adam_step,
    backward,
    forward,
    init_network,
)

__all__ = [
    "AdamState",
    "GradientBundle",
    "NetworkParams",
    "adam_init",
    "adam_step",
    "backward",
    "forward",
    "init_network",
]
