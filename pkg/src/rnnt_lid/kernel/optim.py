"""Adam with bias correction and a warmup-hold-decay learning-rate schedule."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WarmupHoldDecay:
    """Piecewise schedule: linear ramp to peak, flat hold, exponential decay.

    lr(k) for update step k (1-based):
        k <= warmup:          peak * k / warmup
        k <= warmup + hold:   peak
        otherwise:            peak * decay_rate ** (k - warmup - hold)
    """

    peak_lr: float
    warmup_steps: int = 0
    hold_steps: int = 0
    decay_rate: float = 1.0

    def __post_init__(self):
        if self.peak_lr <= 0:
            raise ValueError("peak_lr must be positive")
        if not 0 < self.decay_rate <= 1:
            raise ValueError("decay_rate must be in (0, 1]")

    def lr(self, step):
        if step < 1:
            raise ValueError("schedule steps are 1-based")
        if self.warmup_steps and step <= self.warmup_steps:
            return self.peak_lr * step / self.warmup_steps
        after_hold = step - self.warmup_steps - self.hold_steps
        if after_hold <= 0:
            return self.peak_lr
        return self.peak_lr * self.decay_rate ** after_hold


class Adam:
    """Standard Adam over a named parameter dict; updates in place.

    Moments are allocated lazily per parameter name on the first step, so the
    same optimizer object can drive any model whose `params()` names are
    stable. Shape mismatches between params and grads are rejected.
    """

    def __init__(self, schedule, beta1=0.9, beta2=0.999, epsilon=1e-8):
        self.schedule = schedule
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.step_count = 0
        self.m = {}
        self.v = {}

    @property
    def current_lr(self):
        return self.schedule.lr(max(self.step_count, 1))

    def step(self, params, grads):
        """Apply one update. params/grads: dicts name -> ndarray (same keys)."""
        if params.keys() != grads.keys():
            raise ValueError("adam: params and grads name sets differ")
        self.step_count += 1
        lr = self.schedule.lr(self.step_count)
        b1, b2 = self.beta1, self.beta2
        bc1 = 1.0 - b1 ** self.step_count
        bc2 = 1.0 - b2 ** self.step_count
        for name, p in params.items():
            g = grads[name]
            if g.shape != p.shape:
                raise ValueError(f"adam: shape mismatch for {name}: {g.shape} vs {p.shape}")
            if name not in self.m:
                self.m[name] = np.zeros_like(p)
                self.v[name] = np.zeros_like(p)
            m = self.m[name]
            v = self.v[name]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * (g * g)
            p -= lr * (m / bc1) / (np.sqrt(v / bc2) + self.epsilon)
        return lr


def clip_gradients(grads, max_norm):
    """Scale the whole gradient dict so its global L2 norm is <= max_norm."""
    if max_norm <= 0:
        return 1.0
    total = 0.0
    for g in grads.values():
        total += float(np.sum(g.astype(np.float64) ** 2))
    norm = np.sqrt(total)
    if norm <= max_norm:
        return 1.0
    scale = max_norm / norm
    for g in grads.values():
        g *= scale
    return scale
