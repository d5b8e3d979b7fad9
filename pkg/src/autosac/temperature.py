"""Automatic entropy adjustment: the dual variable alpha = exp(beta).

The temperature loss J(alpha) = mean(-alpha*logpi - alpha*H) has gradient
dJ/dalpha = Hhat - H with Hhat = -mean(logpi); beta is optimized so alpha
stays positive by construction.  A plain-gradient mode exists alongside the
default scalar Adam so the per-update sign property is exactly assertable.
"""

from dataclasses import dataclass, field

import numpy as np

from autosac import net


def default_target_entropy(act_dim):
    """-1 nat per action dimension."""
    if act_dim < 1:
        raise ValueError(f"action dimension must be >= 1, got {act_dim}")
    return -1.0 * act_dim


@dataclass
class TemperatureState:
    beta: float
    target_entropy: float
    lr: float
    use_adam: bool = True
    adam: net.AdamState = field(default=None)

    def __post_init__(self):
        if not np.isfinite(self.beta):
            raise ValueError("beta must be finite")
        if self.adam is None:
            self.adam = net.adam_scalar_init(self.lr)


def make_temperature(target_entropy, lr=3e-4, beta0=0.0, use_adam=True):
    return TemperatureState(beta=beta0, target_entropy=target_entropy, lr=lr, use_adam=use_adam)


def alpha(state):
    return float(np.exp(state.beta))


def temperature_loss_and_grad(state, logp_batch):
    """Returns (J(alpha), dJ/dbeta) for a batch of fresh log-probs."""
    logp = np.asarray(logp_batch, dtype=np.float64)
    if logp.size == 0:
        raise ValueError("empty log-probability batch")
    a = alpha(state)
    h = state.target_entropy
    loss = float(np.mean(-a * logp - a * h))
    d_alpha = float(np.mean(-logp - h))  # = Hhat - H
    return loss, a * d_alpha


def temperature_update(state, grad):
    """Descend beta along dJ/dbeta; Adam by default, plain gradient otherwise."""
    if not np.isfinite(grad):
        raise ValueError(f"non-finite temperature gradient {grad}")
    if state.use_adam:
        state.beta = net.adam_scalar_step(state.beta, state.adam, grad)
    else:
        state.beta = state.beta - state.lr * grad
    return state
