"""Bounded FIFO transition store with uniform with-replacement sampling."""

from dataclasses import dataclass

import numpy as np

DEFAULT_CAPACITY = 1_000_000


@dataclass
class Transition:
    obs: np.ndarray
    action: np.ndarray
    reward: float
    next_obs: np.ndarray
    done: bool          # terminal for bootstrapping (goal/fall, not time limit)
    last: bool          # episode ended here for any reason
    timestamp: int


@dataclass
class Minibatch:
    obs: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_obs: np.ndarray
    dones: np.ndarray

    def __len__(self):
        return self.obs.shape[0]


class ReplayBuffer:
    """Ring buffer over fixed-width float64 arrays; oldest entries overwritten."""

    def __init__(self, obs_dim, act_dim, capacity=DEFAULT_CAPACITY):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.obs_dim = int(obs_dim)
        self.act_dim = int(act_dim)
        self.capacity = int(capacity)
        self._obs = np.zeros((capacity, obs_dim))
        self._actions = np.zeros((capacity, act_dim))
        self._rewards = np.zeros(capacity)
        self._next_obs = np.zeros((capacity, obs_dim))
        self._dones = np.zeros(capacity)
        self._timestamps = np.zeros(capacity, dtype=np.int64)
        self._ptr = 0
        self._size = 0
        self._insertions = 0
        self._episodes = 0

    def __len__(self):
        return self._size

    def push(self, tr: Transition):
        obs = np.asarray(tr.obs, dtype=np.float64)
        action = np.asarray(tr.action, dtype=np.float64)
        if obs.shape != (self.obs_dim,) or action.shape != (self.act_dim,):
            raise ValueError(
                f"transition shapes {obs.shape}/{action.shape} do not match buffer "
                f"schema ({self.obs_dim},)/({self.act_dim},)"
            )
        next_obs = np.asarray(tr.next_obs, dtype=np.float64)
        if next_obs.shape != (self.obs_dim,):
            raise ValueError("next_obs does not match buffer schema")
        if not np.isfinite(tr.reward):
            raise ValueError(f"non-finite reward {tr.reward}")
        i = self._ptr
        self._obs[i] = obs
        self._actions[i] = action
        self._rewards[i] = tr.reward
        self._next_obs[i] = next_obs
        self._dones[i] = 1.0 if tr.done else 0.0
        self._timestamps[i] = tr.timestamp
        self._ptr = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)
        self._insertions += 1
        if tr.last:
            self._episodes += 1

    def sample(self, batch_size, rng) -> Minibatch:
        """batch_size independent uniform draws with replacement."""
        if self._size == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, self._size, size=batch_size)
        return Minibatch(
            self._obs[idx].copy(),
            self._actions[idx].copy(),
            self._rewards[idx].copy(),
            self._next_obs[idx].copy(),
            self._dones[idx].copy(),
        )

    def stats(self):
        """(current size, total insertions, episodes seen)."""
        return self._size, self._insertions, self._episodes

    def rewards_held(self):
        return self._rewards[: self._size]
