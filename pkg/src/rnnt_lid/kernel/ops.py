"""Numerically stable elementwise and reduction primitives.

Log-space code in this package never uses IEEE -inf: impossible events are
represented by the sentinel ``LOG_ZERO`` (-1e30), which keeps every
subtraction finite and lets log-sum-exp run without special cases.
"""

import numpy as np

# Log-probability of an impossible event. Large enough that exp() underflows
# to exactly 0.0 and that adding tens of these never overflows float64.
LOG_ZERO = -1.0e30


def sigmoid(x):
    """Logistic function, stable for large |x|."""
    x = np.asarray(x)
    out = np.empty_like(x, dtype=np.result_type(x, np.float32))
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def logsumexp(x, axis=None):
    """log(sum(exp(x))) with max-subtraction; respects the LOG_ZERO sentinel."""
    x = np.asarray(x, dtype=np.float64)
    m = np.max(x, axis=axis, keepdims=True)
    # Guard fully-impossible reductions: exp(LOG_ZERO - LOG_ZERO) would be 1.
    safe = np.where(m <= LOG_ZERO / 2, 0.0, m)
    s = safe + np.log(np.sum(np.exp(x - safe), axis=axis, keepdims=True))
    s = np.where(m <= LOG_ZERO / 2, LOG_ZERO, s)
    if axis is None:
        return float(s)
    return np.squeeze(s, axis=axis)


def softmax(logits, temperature=1.0):
    """Probability vector over the last axis.

    The temperature divides the logits before exponentiation; stability comes
    from max-subtraction. Non-finite logits and non-positive temperatures are
    contract violations.
    """
    logits = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(logits)):
        raise ValueError("softmax: non-finite logit")
    if not temperature > 0:
        raise ValueError(f"softmax: temperature must be > 0, got {temperature}")
    z = logits / temperature
    z = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def log_softmax(logits, temperature=1.0):
    """log(softmax(logits / temperature)) over the last axis."""
    logits = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(logits)):
        raise ValueError("log_softmax: non-finite logit")
    if not temperature > 0:
        raise ValueError(f"log_softmax: temperature must be > 0, got {temperature}")
    z = logits / temperature
    z = z - np.max(z, axis=-1, keepdims=True)
    return z - np.log(np.sum(np.exp(z), axis=-1, keepdims=True))


def require_finite(name, arr):
    """Raise if `arr` contains NaN or Inf; returns the array unchanged."""
    if not np.all(np.isfinite(arr)):
        raise FloatingPointError(f"{name}: non-finite values detected")
    return arr
