"""Deterministic desk-scale continuous-control environments.

All three environments share the same conventions:

  * actions arrive in [-1, 1] per dimension (the policy squash range) and
    are scaled internally,
  * ``step`` returns ``(obs, reward, done_reason, info)``,
  * every reward is computable from (pre-step raw state, post-step raw
    state, last three actions) through a pure module-level function, so the
    asynchronous reward labeler reproduces it bit-exactly from logged data,
  * ``reset(seed)`` is deterministic given the seed.

Done reasons: 0 = running, 1 = time limit (bootstrapped through),
2 = terminal (goal reached / fall; cuts the bootstrap).
"""

from dataclasses import dataclass

import numpy as np

RUNNING = 0
TIME_LIMIT = 1
TERMINAL = 2


@dataclass
class EnvSpec:
    name: str
    obs_dim: int
    act_dim: int
    raw_dim: int
    t_max: int
    dt: float


@dataclass
class RewardWeights:
    """Crawler reward weights: distance, action acceleration, roll, joint fold."""

    distance: float = 1.0
    acceleration: float = 0.05
    roll: float = 0.5
    fold: float = 1.0
    fold_threshold: float = -0.3

    def as_array(self):
        return np.array(
            [self.distance, self.acceleration, self.roll, self.fold, self.fold_threshold]
        )


def _check_action(action, dim):
    a = np.asarray(action, dtype=np.float64)
    if a.shape != (dim,):
        raise ValueError(f"action shape {a.shape} does not match ({dim},)")
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite action")
    return np.clip(a, -1.0, 1.0)


# ---------------------------------------------------------------------------
# pendulum swing-up


PENDULUM_SPEC = EnvSpec("pendulum", obs_dim=3, act_dim=1, raw_dim=2, t_max=200, dt=0.05)
_PENDULUM_G, _PENDULUM_DT = 10.0, 0.05
_MAX_SPEED, _MAX_TORQUE = 8.0, 2.0


def wrap_angle(theta):
    return ((theta + np.pi) % (2.0 * np.pi)) - np.pi


def pendulum_obs(raw):
    theta, theta_dot = raw[0], raw[1]
    return np.array([np.cos(theta), np.sin(theta), theta_dot])


def pendulum_reward(prev_raw, raw, action, prev_action, prev_action2):
    """Cost on the pre-step state and the applied torque."""
    torque = _MAX_TORQUE * action[0]
    theta = wrap_angle(prev_raw[0])
    return -(theta * theta + 0.1 * prev_raw[1] * prev_raw[1] + 0.001 * torque * torque)


def pendulum_dynamics(raw, action):
    theta, theta_dot = raw[0], raw[1]
    torque = _MAX_TORQUE * action[0]
    theta_acc = 1.5 * _PENDULUM_G * np.sin(theta) + 3.0 * torque
    theta_dot = np.clip(theta_dot + theta_acc * _PENDULUM_DT, -_MAX_SPEED, _MAX_SPEED)
    theta = theta + theta_dot * _PENDULUM_DT
    return np.array([theta, theta_dot])


def pendulum_initial_raw(seed):
    rng = np.random.default_rng(seed)
    return np.array([rng.uniform(-np.pi, np.pi), rng.uniform(-1.0, 1.0)])


# ---------------------------------------------------------------------------
# point mass


POINTMASS_SPEC = EnvSpec("pointmass", obs_dim=2, act_dim=2, raw_dim=2, t_max=100, dt=0.05)
_POINTMASS_GOAL_RADIUS = 0.05
_POINTMASS_SPEED = 0.05


def pointmass_obs(raw):
    return np.array([raw[0], raw[1]])


def pointmass_reward(prev_raw, raw, action, prev_action, prev_action2):
    """Negative distance of the post-step position to the origin goal."""
    return -float(np.hypot(raw[0], raw[1]))


def pointmass_dynamics(raw, action):
    return raw + _POINTMASS_SPEED * action


def pointmass_at_goal(raw):
    return np.hypot(raw[0], raw[1]) < _POINTMASS_GOAL_RADIUS


def pointmass_initial_raw(seed):
    return np.random.default_rng(seed).uniform(-1.0, 1.0, size=2)


# ---------------------------------------------------------------------------
# crawler: two-joint arm dragging a body along x via ratchet ground contact


CRAWLER_SPEC = EnvSpec("crawler", obs_dim=5, act_dim=2, raw_dim=5, t_max=500, dt=0.02)
_CRAWLER_DT = 0.02
_CRAWLER_JOINT_LIMIT = 1.2
_CRAWLER_MAX_JOINT_SPEED = 2.0
_CRAWLER_FALL_ROLL = 0.8
_ROLL_GAIN = 0.3

# raw state layout: [x, q1, q2, dq1, dq2]


def crawler_obs(raw):
    q1, q2 = raw[1], raw[2]
    return np.array([q1, q2, raw[3], raw[4], _ROLL_GAIN * (q1 - q2)])


def crawler_foot_reach(q1, q2):
    return 0.5 * np.cos(q1) + 0.5 * np.cos(q1 + q2)


def crawler_roll(raw):
    return _ROLL_GAIN * (raw[1] - raw[2])


def crawler_dynamics(raw, action):
    """Integrate clamped joint velocities; the body ratchets forward when the
    foot reach shrinks (backward stroke) and slips otherwise."""
    x, q1, q2 = raw[0], raw[1], raw[2]
    v = _CRAWLER_MAX_JOINT_SPEED * action
    q1_new = np.clip(q1 + v[0] * _CRAWLER_DT, -_CRAWLER_JOINT_LIMIT, _CRAWLER_JOINT_LIMIT)
    q2_new = np.clip(q2 + v[1] * _CRAWLER_DT, -_CRAWLER_JOINT_LIMIT, _CRAWLER_JOINT_LIMIT)
    delta_reach = crawler_foot_reach(q1_new, q2_new) - crawler_foot_reach(q1, q2)
    x_new = x + max(0.0, -delta_reach)
    return np.array(
        [x_new, q1_new, q2_new, (q1_new - q1) / _CRAWLER_DT, (q2_new - q2) / _CRAWLER_DT]
    )


def crawler_reward_terms(prev_raw, raw, action, prev_action, prev_action2, weights):
    """(distance, |action acceleration|, |roll|, fold) before weighting."""
    distance = raw[0] - prev_raw[0]
    acc = action - 2.0 * prev_action + prev_action2
    acc_mag = float(np.linalg.norm(acc))
    roll_mag = abs(crawler_roll(raw))
    fold = float(
        max(weights.fold_threshold - raw[1], 0.0) + max(weights.fold_threshold - raw[2], 0.0)
    )
    return distance, acc_mag, roll_mag, fold


def crawler_reward(prev_raw, raw, action, prev_action, prev_action2, weights=None):
    w = weights or RewardWeights()
    d, acc, roll, fold = crawler_reward_terms(prev_raw, raw, action, prev_action, prev_action2, w)
    return w.distance * d - w.acceleration * acc - w.roll * roll - w.fold * fold


def crawler_initial_raw(seed):
    return np.zeros(5)


# ---------------------------------------------------------------------------
# environment classes


class _BaseEnv:
    spec: EnvSpec

    def __init__(self):
        self._raw = None
        self._steps = 0
        self._prev_action = np.zeros(self.spec.act_dim)
        self._prev_action2 = np.zeros(self.spec.act_dim)

    def initial_raw(self, seed):
        raise NotImplementedError

    def dynamics(self, raw, action):
        raise NotImplementedError

    def reward(self, prev_raw, raw, action, prev_action, prev_action2):
        raise NotImplementedError

    def obs(self, raw):
        raise NotImplementedError

    def terminal(self, raw):
        return False

    def reset(self, seed):
        self._raw = self.initial_raw(seed)
        self._steps = 0
        self._prev_action = np.zeros(self.spec.act_dim)
        self._prev_action2 = np.zeros(self.spec.act_dim)
        return self.obs(self._raw)

    def step(self, action):
        action = _check_action(action, self.spec.act_dim)
        prev_raw = self._raw
        raw = self.dynamics(prev_raw, action)
        reward = self.reward(prev_raw, raw, action, self._prev_action, self._prev_action2)
        info = self.step_info(prev_raw, raw, action, self._prev_action, self._prev_action2)
        self._raw = raw
        self._prev_action2 = self._prev_action
        self._prev_action = action
        self._steps += 1
        if self.terminal(raw):
            done = TERMINAL
        elif self._steps >= self.spec.t_max:
            done = TIME_LIMIT
        else:
            done = RUNNING
        return self.obs(raw), reward, done, info

    def step_info(self, prev_raw, raw, action, prev_action, prev_action2):
        return {}

    @property
    def raw_state(self):
        return self._raw.copy()


class PendulumEnv(_BaseEnv):
    spec = PENDULUM_SPEC

    def __init__(self):
        super().__init__()

    initial_raw = staticmethod(pendulum_initial_raw)
    obs = staticmethod(pendulum_obs)

    def dynamics(self, raw, action):
        return pendulum_dynamics(raw, action)

    def reward(self, prev_raw, raw, action, prev_action, prev_action2):
        return pendulum_reward(prev_raw, raw, action, prev_action, prev_action2)


class PointMassEnv(_BaseEnv):
    spec = POINTMASS_SPEC

    initial_raw = staticmethod(pointmass_initial_raw)
    obs = staticmethod(pointmass_obs)

    def dynamics(self, raw, action):
        return pointmass_dynamics(raw, action)

    def reward(self, prev_raw, raw, action, prev_action, prev_action2):
        return pointmass_reward(prev_raw, raw, action, prev_action, prev_action2)

    def terminal(self, raw):
        return pointmass_at_goal(raw)


class CrawlerEnv(_BaseEnv):
    spec = CRAWLER_SPEC

    def __init__(self, weights=None):
        super().__init__()
        self.weights = weights or RewardWeights()

    initial_raw = staticmethod(crawler_initial_raw)
    obs = staticmethod(crawler_obs)

    def dynamics(self, raw, action):
        return crawler_dynamics(raw, action)

    def reward(self, prev_raw, raw, action, prev_action, prev_action2):
        return crawler_reward(prev_raw, raw, action, prev_action, prev_action2, self.weights)

    def terminal(self, raw):
        return abs(crawler_roll(raw)) > _CRAWLER_FALL_ROLL

    def step_info(self, prev_raw, raw, action, prev_action, prev_action2):
        d, acc, roll, fold = crawler_reward_terms(
            prev_raw, raw, action, prev_action, prev_action2, self.weights
        )
        return {"distance": d, "acceleration": acc, "roll": roll, "fold": fold}


# ---------------------------------------------------------------------------
# observation history augmentation


def stack_history(current_obs, past_pairs, k, obs_dim, act_dim):
    """concat(current obs, k most recent (obs, action) pairs), zero padded.

    ``past_pairs`` is most-recent-first; missing history is zero.
    """
    parts = [np.asarray(current_obs, dtype=np.float64)]
    for i in range(k):
        if i < len(past_pairs):
            o, a = past_pairs[i]
            parts.append(np.asarray(o, dtype=np.float64))
            parts.append(np.asarray(a, dtype=np.float64))
        else:
            parts.append(np.zeros(obs_dim))
            parts.append(np.zeros(act_dim))
    return np.concatenate(parts)


def wrap_episode_observations(obs_seq, act_seq, k, obs_dim, act_dim):
    """Wrapped observations for a whole episode (labeler-side reconstruction).

    ``obs_seq`` holds N+1 raw observations, ``act_seq`` the N actions taken;
    returns N+1 wrapped observations matching a HistoryWrapper run exactly.
    """
    wrapped = []
    pairs = []
    for t, obs in enumerate(obs_seq):
        wrapped.append(stack_history(obs, pairs, k, obs_dim, act_dim))
        if t < len(act_seq):
            pairs.insert(0, (obs, np.asarray(act_seq[t], dtype=np.float64)))
            del pairs[k:]
    return wrapped


class HistoryWrapper:
    """Augments observations with the k most recent (obs, action) pairs."""

    def __init__(self, env, k):
        if k < 0:
            raise ValueError("history length must be >= 0")
        self.env = env
        self.k = int(k)
        inner = env.spec
        self.spec = EnvSpec(
            inner.name,
            inner.obs_dim + self.k * (inner.obs_dim + inner.act_dim),
            inner.act_dim,
            inner.raw_dim,
            inner.t_max,
            inner.dt,
        )
        self._pairs = []
        self._last_obs = None

    def reset(self, seed):
        obs = self.env.reset(seed)
        self._pairs = []
        self._last_obs = obs
        return stack_history(obs, self._pairs, self.k, self.env.spec.obs_dim, self.spec.act_dim)

    def step(self, action):
        obs, reward, done, info = self.env.step(action)
        self._pairs.insert(0, (self._last_obs, np.asarray(action, dtype=np.float64)))
        del self._pairs[self.k :]
        self._last_obs = obs
        wrapped = stack_history(
            obs, self._pairs, self.k, self.env.spec.obs_dim, self.spec.act_dim
        )
        return wrapped, reward, done, info

    @property
    def raw_state(self):
        return self.env.raw_state


# ---------------------------------------------------------------------------
# registry


@dataclass
class EnvFunctions:
    """Pure per-env functions the reward labeler shares with the simulator."""

    spec: EnvSpec
    obs_from_raw: callable
    reward_from_raw: callable
    initial_raw: callable
    default_history: int


_REGISTRY = {
    "pendulum": EnvFunctions(PENDULUM_SPEC, pendulum_obs, pendulum_reward, pendulum_initial_raw, 0),
    "pointmass": EnvFunctions(
        POINTMASS_SPEC, pointmass_obs, pointmass_reward, pointmass_initial_raw, 0
    ),
    "crawler": EnvFunctions(CRAWLER_SPEC, crawler_obs, crawler_reward, crawler_initial_raw, 5),
}


def env_names():
    return sorted(_REGISTRY)


def env_functions(name) -> EnvFunctions:
    if name not in _REGISTRY:
        raise ValueError(f"unknown environment {name!r}; choose from {env_names()}")
    return _REGISTRY[name]


def make_env(name, history=None, weights=None):
    """Instantiate an environment, history-wrapped per request or env default."""
    funcs = env_functions(name)
    if name == "pendulum":
        env = PendulumEnv()
    elif name == "pointmass":
        env = PointMassEnv()
    else:
        env = CrawlerEnv(weights)
    k = funcs.default_history if history is None else int(history)
    if k > 0:
        return HistoryWrapper(env, k)
    return env
