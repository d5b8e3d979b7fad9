"""Dense feed-forward networks with hand-written exact gradients and Adam.

Everything here is plain float64 numpy. Inputs may be single vectors
(shape ``(d,)``) or batches (shape ``(B, d)``); parameter gradients are
summed over the batch either way.
"""

from dataclasses import dataclass, field

import numpy as np

RELU = "relu"
IDENTITY = "identity"


@dataclass
class NetworkParams:
    """Weights/biases of one MLP; weights are (out, in), biases (out,)."""

    weights: list
    biases: list
    activations: list

    @property
    def layer_dims(self):
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def copy(self):
        return NetworkParams(
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            list(self.activations),
        )


@dataclass
class GradientBundle:
    """Per-parameter gradients mirroring NetworkParams shapes."""

    weights: list
    biases: list


@dataclass
class AdamState:
    """First/second moment accumulators plus hyperparameters for one net."""

    m_weights: list
    m_biases: list
    v_weights: list
    v_biases: list
    step_size: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0


def init_network(layer_dims, seed):
    """Build an MLP with relu hidden layers and an identity output layer.

    Weights are uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero,
    drawn deterministically from ``seed``.
    """
    if len(layer_dims) < 2:
        raise ValueError(f"need at least input and output dims, got {layer_dims}")
    if any(int(d) <= 0 for d in layer_dims):
        raise ValueError(f"layer dims must be positive, got {layer_dims}")
    rng = np.random.default_rng(seed)
    weights, biases, activations = [], [], []
    n_layers = len(layer_dims) - 1
    for k in range(n_layers):
        fan_in, fan_out = int(layer_dims[k]), int(layer_dims[k + 1])
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
        activations.append(IDENTITY if k == n_layers - 1 else RELU)
    return NetworkParams(weights, biases, activations)


def forward(params, x):
    """Evaluate the network; returns (output, cache) where cache feeds backward.

    The cache stores each layer's input and its pre-activation sign mask,
    which is all the relu/identity backward pass needs.
    """
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    h = x[None, :] if squeeze else x
    if h.shape[-1] != params.weights[0].shape[1]:
        raise ValueError(
            f"input dim {h.shape[-1]} does not match first layer "
            f"fan-in {params.weights[0].shape[1]}"
        )
    inputs, masks = [], []
    for w, b, act in zip(params.weights, params.biases, params.activations):
        inputs.append(h)
        z = h @ w.T + b
        if act == RELU:
            mask = z > 0.0
            h = np.where(mask, z, 0.0)
            masks.append(mask)
        else:
            h = z
            masks.append(None)
    cache = (inputs, masks, squeeze)
    return (h[0] if squeeze else h), cache


def backward(params, cache, output_grad):
    """Exact gradients of sum(output * output_grad) w.r.t. params and input.

    Returns (GradientBundle, input_grad); parameter gradients are summed
    over the batch, the input gradient keeps the batch shape.
    """
    inputs, masks, squeeze = cache
    g = np.asarray(output_grad, dtype=np.float64)
    if squeeze:
        g = g[None, :]
    if len(inputs) != len(params.weights) or inputs[0].shape[-1] != params.weights[0].shape[1]:
        raise ValueError("cache does not match network parameters")
    if g.shape != (inputs[0].shape[0], params.weights[-1].shape[0]):
        raise ValueError(
            f"output_grad shape {g.shape} does not match "
            f"(batch, {params.weights[-1].shape[0]})"
        )
    gw = [None] * len(params.weights)
    gb = [None] * len(params.biases)
    for k in range(len(params.weights) - 1, -1, -1):
        if masks[k] is not None:
            g = np.where(masks[k], g, 0.0)
        gw[k] = g.T @ inputs[k]
        gb[k] = g.sum(axis=0)
        g = g @ params.weights[k]
    return GradientBundle(gw, gb), (g[0] if squeeze else g)


def input_gradient(params, cache, output_grad):
    """Like backward but returns only the input gradient (skips dW/db gemms)."""
    inputs, masks, squeeze = cache
    g = np.asarray(output_grad, dtype=np.float64)
    if squeeze:
        g = g[None, :]
    for k in range(len(params.weights) - 1, -1, -1):
        if masks[k] is not None:
            g = np.where(masks[k], g, 0.0)
        g = g @ params.weights[k]
    return g[0] if squeeze else g


def zero_grads(params):
    return GradientBundle(
        [np.zeros_like(w) for w in params.weights],
        [np.zeros_like(b) for b in params.biases],
    )


def adam_init(params, step_size, beta1=0.9, beta2=0.999, eps=1e-8):
    return AdamState(
        m_weights=[np.zeros_like(w) for w in params.weights],
        m_biases=[np.zeros_like(b) for b in params.biases],
        v_weights=[np.zeros_like(w) for w in params.weights],
        v_biases=[np.zeros_like(b) for b in params.biases],
        step_size=step_size,
        beta1=beta1,
        beta2=beta2,
        eps=eps,
    )


def adam_step(params, state, grads):
    """One bias-corrected Adam update, in place on params and state."""
    if len(grads.weights) != len(params.weights):
        raise ValueError("gradient bundle does not match parameter shapes")
    for g in grads.weights + grads.biases:
        if not np.all(np.isfinite(g)):
            raise ValueError("non-finite gradients passed to adam_step")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    corr1 = 1.0 - b1 ** state.t
    corr2 = 1.0 - b2 ** state.t
    scale = state.step_size / corr1
    pairs = (
        (params.weights, state.m_weights, state.v_weights, grads.weights),
        (params.biases, state.m_biases, state.v_biases, grads.biases),
    )
    for values, ms, vs, gs in pairs:
        for value, m, v, g in zip(values, ms, vs, gs):
            if g.shape != value.shape:
                raise ValueError(
                    f"gradient shape {g.shape} does not match parameter {value.shape}"
                )
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            value -= scale * m / (np.sqrt(v / corr2) + state.eps)


def adam_scalar_init(step_size, beta1=0.9, beta2=0.999, eps=1e-8):
    """Adam state for a single scalar parameter (used for the temperature)."""
    return AdamState([np.zeros(1)], [], [np.zeros(1)], [], step_size, beta1, beta2, eps)


def adam_scalar_step(value, state, grad):
    """Scalar Adam update; returns the new value."""
    if not np.isfinite(grad):
        raise ValueError("non-finite gradient passed to adam_scalar_step")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    m, v = state.m_weights[0], state.v_weights[0]
    m *= b1
    m += (1.0 - b1) * grad
    v *= b2
    v += (1.0 - b2) * grad * grad
    mhat = m[0] / (1.0 - b1 ** state.t)
    vhat = v[0] / (1.0 - b2 ** state.t)
    return value - state.step_size * mhat / (np.sqrt(vhat) + state.eps)
