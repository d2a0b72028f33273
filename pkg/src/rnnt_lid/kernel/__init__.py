"""Minimal neural substrate: stable numerics, layers with exact manual
backpropagation, Adam with a warmup-hold-decay schedule, and checkpoint IO.

Tensors are plain 2-D row-major numpy arrays throughout; float64 is the
default (test/oracle) precision and float32 is available for training via
the `precision` config switch.
"""

from .ops import LOG_ZERO, log_softmax, logsumexp, require_finite, sigmoid, softmax
from .optim import Adam, WarmupHoldDecay
from .layers import Dense, Embedding, Lstm, LstmStack, glorot_uniform, rng_for

__all__ = [
    "LOG_ZERO",
    "Adam",
    "Dense",
    "Embedding",
    "Lstm",
    "LstmStack",
    "WarmupHoldDecay",
    "glorot_uniform",
    "log_softmax",
    "logsumexp",
    "require_finite",
    "rng_for",
    "sigmoid",
    "softmax",
]
