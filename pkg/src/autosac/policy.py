"""Tanh-squashed diagonal Gaussian policy with reparameterized sampling.

The network maps an observation to 2*d_a outputs, read as the mean vector
followed by the per-dimension log standard deviation.  Actions are
tanh(mu + sigma*eps) with the exact change-of-variables log-density.
Randomness is always passed in as explicit noise so callers own the rng.
"""

from dataclasses import dataclass

import numpy as np

from autosac import net

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
LOG_2PI = np.log(2.0 * np.pi)


@dataclass
class PolicyHead:
    network: net.NetworkParams
    obs_dim: int
    act_dim: int


@dataclass
class ActionSample:
    eps: np.ndarray
    pre_squash: np.ndarray
    action: np.ndarray
    log_prob: np.ndarray


def init_policy(obs_dim, act_dim, hidden_dims, seed):
    dims = [obs_dim] + list(hidden_dims) + [2 * act_dim]
    return PolicyHead(net.init_network(dims, seed), obs_dim, act_dim)


def softplus(z):
    z = np.asarray(z, dtype=np.float64)
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def tanh_log_jacobian(u):
    """log(1 - tanh(u)^2), stable for |u| up to hundreds."""
    return 2.0 * (np.log(2.0) - u - softplus(-2.0 * u))


def policy_distribution(head, obs):
    """Return (mu, sigma) for one observation or a batch; sigma > 0."""
    obs = np.asarray(obs, dtype=np.float64)
    if not np.all(np.isfinite(obs)):
        raise ValueError("non-finite observation")
    out, cache = net.forward(head.network, obs)
    mu = out[..., : head.act_dim]
    log_std = np.clip(out[..., head.act_dim :], LOG_STD_MIN, LOG_STD_MAX)
    return mu, np.exp(log_std)


def log_prob(mu, sigma, u):
    """log pi(a|s) for a = tanh(u), summed over action dimensions (nats)."""
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    z = (u - mu) / sigma
    gauss = -0.5 * z * z - np.log(sigma) - 0.5 * LOG_2PI
    return np.sum(gauss - tanh_log_jacobian(u), axis=-1)


def sample_action(mu, sigma, eps):
    """Reparameterized sample: deterministic in (mu, sigma, eps)."""
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    u = mu + sigma * eps
    return ActionSample(eps, u, np.tanh(u), log_prob(mu, sigma, u))


def deterministic_action(head, obs):
    """tanh of the mean; the evaluation-time policy."""
    mu, _ = policy_distribution(head, obs)
    return np.tanh(mu)


def reparam_log_prob_partials(sigma, u, eps):
    """d log pi / d mu and d sigma for the policy's own sample a = tanh(u).

    With u = mu + sigma*eps and eps held fixed the Gaussian term's direct and
    chain contributions cancel for mu, leaving only the squash correction:
        d/d mu   = 2*tanh(u)
        d/d sigma = 2*tanh(u)*eps - 1/sigma
    """
    t = np.tanh(u)
    return 2.0 * t, 2.0 * t * eps - 1.0 / sigma


def head_output_gradient(head, obs_cache_out, d_mu, d_sigma):
    """Map (d/d mu, d/d sigma) to the gradient at the raw network output.

    sigma = exp(clip(log_std)); the clip contributes a zero gradient outside
    its bounds.  Returns the (…, 2*d_a) output gradient ready for backward.
    """
    out = obs_cache_out
    raw_log_std = out[..., head.act_dim :]
    inside = (raw_log_std > LOG_STD_MIN) & (raw_log_std < LOG_STD_MAX)
    sigma = np.exp(np.clip(raw_log_std, LOG_STD_MIN, LOG_STD_MAX))
    d_log_std = np.where(inside, d_sigma * sigma, 0.0)
    return np.concatenate([d_mu, d_log_std], axis=-1)
