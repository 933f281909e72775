"""Small fully-connected networks with hand-coded reverse-mode gradients,
plus an Adam optimizer.  Everything is float64 numpy; inputs may be a
single vector or a (batch, features) array.

All parameters of a network live in one flat vector; the per-layer
weight/bias arrays are views into it, so optimizer and target-network
updates are single whole-vector operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Mlp",
    "mlp_forward",
    "mlp_forward_cached",
    "mlp_gradients",
    "flatten_gradients",
    "Adam",
    "soft_update",
]


def _layer_views(flat: np.ndarray, layer_dims: list[int]):
    weights, biases = [], []
    off = 0
    for d_in, d_out in zip(layer_dims[:-1], layer_dims[1:]):
        weights.append(flat[off : off + d_out * d_in].reshape(d_out, d_in))
        off += d_out * d_in
        biases.append(flat[off : off + d_out])
        off += d_out
    assert off == flat.size
    return weights, biases


def _param_count(layer_dims: list[int]) -> int:
    return sum((d_in + 1) * d_out for d_in, d_out in zip(layer_dims[:-1], layer_dims[1:]))


@dataclass
class Mlp:
    """Multilayer perceptron: ReLU hidden layers, 'tanh' or 'identity' output."""

    flat: np.ndarray
    layer_dims: list[int]
    output_activation: str = "identity"
    weights: list[np.ndarray] = field(init=False, repr=False)
    biases: list[np.ndarray] = field(init=False, repr=False)

    def __post_init__(self):
        if self.output_activation not in ("identity", "tanh"):
            raise ValueError(f"unknown output activation {self.output_activation!r}")
        if self.flat.size != _param_count(self.layer_dims):
            raise ValueError("flat parameter vector does not match layer dims")
        self.weights, self.biases = _layer_views(self.flat, self.layer_dims)

    @classmethod
    def create(
        cls,
        layer_dims: list[int],
        rng: np.random.Generator,
        output_activation: str = "identity",
    ) -> "Mlp":
        if len(layer_dims) < 2 or any(d < 1 for d in layer_dims):
            raise ValueError(f"bad layer dims {layer_dims}")
        net = cls(
            flat=np.zeros(_param_count(layer_dims)),
            layer_dims=list(layer_dims),
            output_activation=output_activation,
        )
        for w in net.weights:
            # He-style fan-in scaling keeps activations O(1) through ReLU stacks
            w[:] = rng.standard_normal(w.shape) / np.sqrt(w.shape[1])
        return net

    def copy(self) -> "Mlp":
        return Mlp(
            flat=self.flat.copy(),
            layer_dims=list(self.layer_dims),
            output_activation=self.output_activation,
        )


def _as_batch(x: np.ndarray, dim: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[np.newaxis, :]
    if x.shape[1] != dim:
        raise ValueError(f"input feature size {x.shape[1]} != expected {dim}")
    return x, single


def mlp_forward_cached(net: Mlp, x: np.ndarray):
    """Forward pass returning (output, cache) for use by mlp_gradients."""
    h, single = _as_batch(x, net.layer_dims[0])
    pre_acts = []
    activations = [h]
    n_layers = len(net.weights)
    for l, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = h @ w.T + b
        pre_acts.append(z)
        if l < n_layers - 1:
            h = np.maximum(z, 0.0)
        elif net.output_activation == "tanh":
            h = np.tanh(z)
        else:
            h = z
        activations.append(h)
    out = h[0] if single else h
    return out, (pre_acts, activations, single)


def mlp_forward(net: Mlp, x: np.ndarray) -> np.ndarray:
    return mlp_forward_cached(net, x)[0]


def mlp_gradients(net: Mlp, cache, upstream: np.ndarray):
    """Backpropagate ``upstream`` (d loss / d output) through the cached
    forward pass.  Returns (weight_grads, bias_grads, input_grad); batch
    gradients are summed over the batch."""
    pre_acts, activations, single = cache
    g = np.asarray(upstream, dtype=float)
    if single:
        g = g[np.newaxis, :]
    n_layers = len(net.weights)
    w_grads = [None] * n_layers
    b_grads = [None] * n_layers
    for l in range(n_layers - 1, -1, -1):
        if l == n_layers - 1:
            if net.output_activation == "tanh":
                g = g * (1.0 - activations[l + 1] ** 2)
        else:
            g = g * (pre_acts[l] > 0.0)
        w_grads[l] = g.T @ activations[l]
        b_grads[l] = g.sum(axis=0)
        g = g @ net.weights[l]
    input_grad = g[0] if single else g
    return w_grads, b_grads, input_grad


def flatten_gradients(w_grads, b_grads) -> np.ndarray:
    """Concatenate per-layer gradients in the network's flat layout."""
    parts = []
    for w_g, b_g in zip(w_grads, b_grads):
        parts.append(w_g.ravel())
        parts.append(b_g)
    return np.concatenate(parts)


@dataclass
class Adam:
    """Adaptive-moment optimizer over one flat parameter vector."""

    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: np.ndarray | None = None
    v: np.ndarray | None = None

    def step(self, params: np.ndarray, grads: np.ndarray) -> None:
        """Update ``params`` in place to descend along ``grads``."""
        if self.m is None:
            self.m = np.zeros_like(params)
            self.v = np.zeros_like(params)
        if params.shape != self.m.shape:
            raise ValueError("parameter size changed under the optimizer")
        self.t += 1
        # fused bias correction: p -= lr_t * m / (sqrt(v) + eps * sqrt(bc2))
        bc2_sqrt = np.sqrt(1.0 - self.beta2**self.t)
        lr_t = self.lr * bc2_sqrt / (1.0 - self.beta1**self.t)
        self.m *= self.beta1
        self.m += (1.0 - self.beta1) * grads
        self.v *= self.beta2
        self.v += (1.0 - self.beta2) * np.square(grads)
        denom = np.sqrt(self.v)
        denom += self.eps * bc2_sqrt
        params -= lr_t * self.m / denom


def soft_update(target: Mlp, main: Mlp, tau: float) -> None:
    """Blend main parameters into the target network in place."""
    if target.layer_dims != main.layer_dims:
        raise ValueError("target and main networks differ in structure")
    if not 0.0 < tau <= 1.0:
        raise ValueError("tau must be in (0, 1]")
    target.flat *= 1.0 - tau
    target.flat += tau * main.flat
