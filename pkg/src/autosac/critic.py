"""Twin soft Q-functions, their regression/policy losses, and target updates.

Conventions used throughout:
  * critics map concat(obs, action) -> scalar,
  * bootstrap targets are constants (no gradient flows into targets or the
    policy from the Q regression),
  * the policy loss flows through the reparameterized action into the main
    critics' inputs while critic parameters stay fixed,
  * ties in min(Q1, Q2) resolve to Q1.
"""

from dataclasses import dataclass

import numpy as np

from autosac import net, policy


@dataclass
class CriticPair:
    q1: net.NetworkParams
    q2: net.NetworkParams
    q1_target: net.NetworkParams
    q2_target: net.NetworkParams
    tau: float

    def copy(self):
        return CriticPair(
            self.q1.copy(), self.q2.copy(), self.q1_target.copy(), self.q2_target.copy(), self.tau
        )


def init_critic_pair(obs_dim, act_dim, hidden_dims, seed, tau=0.005):
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    dims = [obs_dim + act_dim] + list(hidden_dims) + [1]
    child = np.random.default_rng(seed).integers(2**31, size=2)
    q1 = net.init_network(dims, int(child[0]))
    q2 = net.init_network(dims, int(child[1]))
    return CriticPair(q1, q2, q1.copy(), q2.copy(), tau)


def q_value(params, s, a):
    """Q(s, a) for one pair or a batch; returns scalar or (B,)."""
    s = np.asarray(s, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    x = np.concatenate([s, a], axis=-1)
    out, _ = net.forward(params, x)
    return out[..., 0]


def soft_state_value(critic, head, alpha, s, eps):
    """min of the target critics at one fresh policy sample, minus alpha*logpi."""
    mu, sigma = policy.policy_distribution(head, s)
    sample = policy.sample_action(mu, sigma, eps)
    q1 = q_value(critic.q1_target, s, sample.action)
    q2 = q_value(critic.q2_target, s, sample.action)
    return np.minimum(q1, q2) - alpha * sample.log_prob


def q_loss_and_grads(critic, head, alpha, batch, gamma, eps_next):
    """Mean-squared soft Bellman regression for both critics.

    Returns (loss, grads_q1, grads_q2) where loss is the mean of the two
    per-critic losses and each gradient bundle is for that critic's own loss.
    """
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must be in [0, 1), got {gamma}")
    v_next = soft_state_value(critic, head, alpha, batch.next_obs, eps_next)
    y = batch.rewards + gamma * (1.0 - batch.dones) * v_next
    if not np.all(np.isfinite(y)):
        bad = np.flatnonzero(~np.isfinite(y))
        raise ValueError(
            f"non-finite bootstrap targets at batch indices {bad.tolist()[:8]} "
            f"(rewards {batch.rewards[bad[:8]].tolist()}, v_next {v_next[bad[:8]].tolist()})"
        )
    x = np.concatenate([batch.obs, batch.actions], axis=-1)
    b = x.shape[0]
    losses = []
    grads = []
    for params in (critic.q1, critic.q2):
        out, cache = net.forward(params, x)
        err = out[:, 0] - y
        losses.append(float(err @ err) / b)
        g, _ = net.backward(params, cache, (2.0 / b) * err[:, None])
        grads.append(g)
    return 0.5 * (losses[0] + losses[1]), grads[0], grads[1]


def policy_loss_and_grads(critic, head, alpha, states, eps):
    """Reparameterized policy loss mean(alpha*logpi(a~|s) - min Q(s, a~)).

    Returns (loss, policy gradients, per-sample logpi).  Critic parameters
    are read-only here; gradients reach the policy both through alpha*logpi
    and through the critics' action inputs.
    """
    states = np.asarray(states, dtype=np.float64)
    b = states.shape[0]
    out, head_cache = net.forward(head.network, states)
    mu = out[:, : head.act_dim]
    sigma = np.exp(np.clip(out[:, head.act_dim :], policy.LOG_STD_MIN, policy.LOG_STD_MAX))
    u = mu + sigma * eps
    a = np.tanh(u)
    logp = policy.log_prob(mu, sigma, u)

    x = np.concatenate([states, a], axis=-1)
    out1, cache1 = net.forward(critic.q1, x)
    out2, cache2 = net.forward(critic.q2, x)
    q1, q2 = out1[:, 0], out2[:, 0]
    qmin = np.minimum(q1, q2)
    loss = float(np.mean(alpha * logp - qmin))

    mask1 = (q1 <= q2).astype(np.float64)
    gx1 = net.input_gradient(critic.q1, cache1, (-mask1 / b)[:, None])
    gx2 = net.input_gradient(critic.q2, cache2, (-(1.0 - mask1) / b)[:, None])
    d_action = (gx1 + gx2)[:, states.shape[1] :]

    d_lp_mu, d_lp_sigma = policy.reparam_log_prob_partials(sigma, u, eps)
    d_u = d_action * (1.0 - a * a)
    d_mu = (alpha / b) * d_lp_mu + d_u
    d_sigma = (alpha / b) * d_lp_sigma + d_u * eps
    out_grad = policy.head_output_gradient(head, out, d_mu, d_sigma)
    grads, _ = net.backward(head.network, head_cache, out_grad)
    return loss, grads, logp


def target_update(critic, tau=None):
    """Polyak step: target <- tau*main + (1-tau)*target, in place."""
    t = critic.tau if tau is None else tau
    if not 0.0 < t <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {t}")
    for main, target in ((critic.q1, critic.q1_target), (critic.q2, critic.q2_target)):
        for w, wt in zip(main.weights, target.weights):
            wt *= 1.0 - t
            wt += t * w
        for b_, bt in zip(main.biases, target.biases):
            bt *= 1.0 - t
            bt += t * b_
