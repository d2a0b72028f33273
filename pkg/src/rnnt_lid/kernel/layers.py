"""Layers with exact manual backpropagation: dense, embedding, LSTM stacks.

Design notes that matter for reproducibility and for the bit-exact
conditioning-reduction checks elsewhere in the package:

* Every parameter tensor is initialized from its own PRNG stream derived
  from (seed, tensor name), so two models that share a subset of tensor
  names get bit-identical values for those tensors regardless of what else
  they contain.
* Auxiliary conditioning inputs never get concatenated into a layer's main
  input. They enter through a separate weight matrix whose contribution is
  added afterwards, so zeroing that matrix reproduces the unconditioned
  computation exactly (adding an exact-zero vector is a bitwise no-op).
* Gradients accumulate in-place on each layer (`gw`, `gb`, ...); call
  `zero_grads()` between batches.
"""

import hashlib

import numpy as np

from .ops import sigmoid


def rng_for(seed, name):
    """A PRNG stream keyed by (seed, tensor name), stable across platforms."""
    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    return np.random.Generator(np.random.PCG64(int.from_bytes(digest[:8], "little")))


def glorot_uniform(rng, shape, dtype=np.float64):
    """Uniform in [-s, s] with s = sqrt(6 / (fan_in + fan_out))."""
    fan_in, fan_out = shape[0], shape[-1]
    s = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-s, s, size=shape).astype(dtype)


class Dense:
    """y = x @ w + b."""

    def __init__(self, in_dim, out_dim, seed, name, dtype=np.float64):
        self.name = name
        self.w = glorot_uniform(rng_for(seed, f"{name}.w"), (in_dim, out_dim), dtype)
        self.b = np.zeros(out_dim, dtype=dtype)
        self.zero_grads()

    def zero_grads(self):
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)

    def params(self):
        yield f"{self.name}.w", self.w
        yield f"{self.name}.b", self.b

    def grads(self):
        yield f"{self.name}.w", self.gw
        yield f"{self.name}.b", self.gb

    def forward(self, x):
        return x @ self.w + self.b

    def backward(self, x, dy):
        """Accumulate parameter grads; return dL/dx. `x` is the forward input."""
        x2 = x.reshape(-1, x.shape[-1])
        dy2 = dy.reshape(-1, dy.shape[-1])
        self.gw += x2.T @ dy2
        self.gb += dy2.sum(axis=0)
        return dy @ self.w.T


class Embedding:
    """Token-id lookup table. Row `sos_row` (the last row) is reserved for
    the start-of-sequence sentinel."""

    def __init__(self, n_ids, dim, seed, name, dtype=np.float64):
        self.name = name
        # +1 row: start-of-sequence sentinel.
        self.table = glorot_uniform(rng_for(seed, f"{name}.table"), (n_ids + 1, dim), dtype)
        self.sos_row = n_ids
        self.zero_grads()

    def zero_grads(self):
        self.gtable = np.zeros_like(self.table)

    def params(self):
        yield f"{self.name}.table", self.table

    def grads(self):
        yield f"{self.name}.table", self.gtable

    def forward(self, row):
        return self.table[row]

    def backward(self, row, dy):
        self.gtable[row] += dy


class Lstm:
    """Single unidirectional LSTM layer with an optional side input.

    Gate order in the fused weight matrix is (i, f, g, o):
        pre = [x; h_prev] @ w (+ side @ w_side) + b
        c   = sigmoid(f) * c_prev + sigmoid(i) * tanh(g)
        h   = sigmoid(o) * tanh(c)
    The forget-gate bias starts at 1.0. The side input (used for language
    conditioning at the encoder input) has its own matrix so that a zero
    `w_side` reproduces the side-free computation bit for bit.
    """

    def __init__(self, in_dim, hidden_dim, seed, name, side_dim=0, dtype=np.float64):
        self.name = name
        self.in_dim = in_dim
        self.hidden_dim = hidden_dim
        self.side_dim = side_dim
        self.w = glorot_uniform(
            rng_for(seed, f"{name}.w"), (in_dim + hidden_dim, 4 * hidden_dim), dtype
        )
        self.b = np.zeros(4 * hidden_dim, dtype=dtype)
        self.b[hidden_dim : 2 * hidden_dim] = 1.0  # forget gate
        if side_dim:
            self.w_side = glorot_uniform(
                rng_for(seed, f"{name}.w_side"), (side_dim, 4 * hidden_dim), dtype
            )
        self.zero_grads()

    def zero_grads(self):
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        if self.side_dim:
            self.gw_side = np.zeros_like(self.w_side)

    def params(self):
        yield f"{self.name}.w", self.w
        yield f"{self.name}.b", self.b
        if self.side_dim:
            yield f"{self.name}.w_side", self.w_side

    def grads(self):
        yield f"{self.name}.w", self.gw
        yield f"{self.name}.b", self.gb
        if self.side_dim:
            yield f"{self.name}.w_side", self.gw_side

    def initial_state(self, dtype=None):
        dtype = dtype or self.w.dtype
        h = self.hidden_dim
        return np.zeros(h, dtype=dtype), np.zeros(h, dtype=dtype)

    def _gates(self, x, h_prev, side):
        if x.shape[-1] != self.in_dim:
            raise ValueError(
                f"{self.name}: input dim {x.shape[-1]} != expected {self.in_dim}"
            )
        pre = np.concatenate([x, h_prev]) @ self.w + self.b
        if side is not None:
            if not self.side_dim:
                raise ValueError(f"{self.name}: side input given to a side-less layer")
            pre = pre + side @ self.w_side
        h = self.hidden_dim
        i = sigmoid(pre[:h])
        f = sigmoid(pre[h : 2 * h])
        g = np.tanh(pre[2 * h : 3 * h])
        o = sigmoid(pre[3 * h :])
        return i, f, g, o

    def step(self, x, state, side=None):
        """Advance one frame; returns (h, new_state). Pure in (params, args)."""
        c_prev, h_prev = state
        i, f, g, o = self._gates(x, h_prev, side)
        c = f * c_prev + i * g
        h = o * np.tanh(c)
        return h, (c, h)

    def forward(self, xs, state=None, sides=None):
        """Run a whole sequence, recording intermediates for backward.

        xs: (T, in_dim). Returns (hs, cache) with hs: (T, hidden_dim).
        """
        T = xs.shape[0]
        if state is None:
            state = self.initial_state(xs.dtype)
        c_prev, h_prev = state
        H = self.hidden_dim
        rec = {
            "xs": xs,
            "sides": sides,
            "i": np.empty((T, H), xs.dtype),
            "f": np.empty((T, H), xs.dtype),
            "g": np.empty((T, H), xs.dtype),
            "o": np.empty((T, H), xs.dtype),
            "c": np.empty((T, H), xs.dtype),
            "h_prev": np.empty((T, H), xs.dtype),
            "c_prev0": c_prev,
        }
        hs = np.empty((T, H), xs.dtype)
        c = c_prev
        h = h_prev
        for t in range(T):
            rec["h_prev"][t] = h
            side = None if sides is None else sides[t]
            i, f, g, o = self._gates(xs[t], h, side)
            c_old = c
            c = f * c_old + i * g
            h = o * np.tanh(c)
            rec["i"][t], rec["f"][t], rec["g"][t], rec["o"][t] = i, f, g, o
            rec["c"][t] = c
            hs[t] = h
        rec["hs"] = hs
        return hs, rec

    def backward(self, rec, dhs, dstate_last=None):
        """BPTT through a recorded forward. Returns (dxs, dsides or None).

        Accumulates gw/gb/gw_side. `dstate_last` optionally injects
        (dc, dh) arriving at the final state from downstream consumers.
        """
        xs, sides = rec["xs"], rec["sides"]
        T, H = rec["c"].shape
        dxs = np.zeros_like(xs)
        dsides = None if sides is None else np.zeros_like(sides)
        dc_next = np.zeros(H, xs.dtype)
        dh_next = np.zeros(H, xs.dtype)
        if dstate_last is not None:
            dc_next = dc_next + dstate_last[0]
            dh_next = dh_next + dstate_last[1]
        for t in range(T - 1, -1, -1):
            i, f, g, o = rec["i"][t], rec["f"][t], rec["g"][t], rec["o"][t]
            c = rec["c"][t]
            c_prev = rec["c"][t - 1] if t > 0 else rec["c_prev0"]
            tc = np.tanh(c)
            dh = dhs[t] + dh_next
            do = dh * tc
            dc = dh * o * (1.0 - tc * tc) + dc_next
            di = dc * g
            dg = dc * i
            df = dc * c_prev
            dc_next = dc * f
            dpre = np.concatenate(
                [
                    di * i * (1.0 - i),
                    df * f * (1.0 - f),
                    dg * (1.0 - g * g),
                    do * o * (1.0 - o),
                ]
            )
            xh = np.concatenate([xs[t], rec["h_prev"][t]])
            self.gw += np.outer(xh, dpre)
            self.gb += dpre
            dxh = self.w @ dpre
            dxs[t] = dxh[: self.in_dim]
            dh_next = dxh[self.in_dim :]
            if sides is not None:
                self.gw_side += np.outer(sides[t], dpre)
                dsides[t] = self.w_side @ dpre
        return dxs, dsides


class LstmStack:
    """A stack of LSTM layers with inverted dropout between layers.

    Only the first layer may take a side input. Dropout masks are drawn from
    the rng passed to `forward` (training only) and applied to each layer's
    output except the last, scaled by 1/keep so inference needs no rescaling.
    """

    def __init__(self, in_dim, hidden_dim, n_layers, seed, name,
                 side_dim=0, dropout=0.0, dtype=np.float64):
        self.name = name
        self.dropout = dropout
        self.layers = []
        for k in range(n_layers):
            self.layers.append(
                Lstm(
                    in_dim if k == 0 else hidden_dim,
                    hidden_dim,
                    seed,
                    f"{name}.l{k}",
                    side_dim=side_dim if k == 0 else 0,
                    dtype=dtype,
                )
            )

    @property
    def hidden_dim(self):
        return self.layers[-1].hidden_dim

    def zero_grads(self):
        for layer in self.layers:
            layer.zero_grads()

    def params(self):
        for layer in self.layers:
            yield from layer.params()

    def grads(self):
        for layer in self.layers:
            yield from layer.grads()

    def initial_state(self, dtype=None):
        return [layer.initial_state(dtype) for layer in self.layers]

    def step(self, x, states, side=None):
        """One frame through all layers; returns (top h, new states)."""
        new_states = []
        h = x
        for k, layer in enumerate(self.layers):
            h, st = layer.step(h, states[k], side=side if k == 0 else None)
            new_states.append(st)
        return h, new_states

    def forward(self, xs, sides=None, train=False, rng=None):
        """Whole-sequence forward with cache. Dropout only if train and rng."""
        caches = []
        masks = []
        h = xs
        for k, layer in enumerate(self.layers):
            h, rec = layer.forward(h, sides=sides if k == 0 else None)
            caches.append(rec)
            if train and self.dropout > 0.0 and k < len(self.layers) - 1:
                if rng is None:
                    raise ValueError(f"{self.name}: dropout requires an rng in training")
                keep = 1.0 - self.dropout
                mask = (rng.random(h.shape) < keep).astype(h.dtype) / keep
                h = h * mask
                masks.append(mask)
            else:
                masks.append(None)
        return h, {"caches": caches, "masks": masks}

    def backward(self, cache, dhs):
        """Returns (dxs, dsides or None) and accumulates layer grads."""
        d = dhs
        dsides = None
        for k in range(len(self.layers) - 1, -1, -1):
            mask = cache["masks"][k]
            if mask is not None:
                d = d * mask
            d, ds = self.layers[k].backward(cache["caches"][k], d)
            if k == 0:
                dsides = ds
        return d, dsides
