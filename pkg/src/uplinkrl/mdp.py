"""Environment and trajectory contracts shared by agents and the harness.

Environments are stateful objects with reset/step; observations carry the
raw state vector together with a feature-name schema so reward
expressions can bind by name instead of by index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import ConfigError, ContractError, UnknownFeatureError


@dataclass(frozen=True)
class DiscreteSpace:
    """Finite action set {0, ..., n - 1}."""

    n: int

    def __post_init__(self):
        if self.n <= 0:
            raise ConfigError(f"discrete space needs n > 0, got {self.n}")


@dataclass(frozen=True)
class BoxSpace:
    """Axis-aligned continuous action box."""

    low: tuple
    high: tuple

    def __post_init__(self):
        if len(self.low) != len(self.high):
            raise ConfigError("low/high lengths differ")
        if any(l >= h for l, h in zip(self.low, self.high)):
            raise ConfigError("each low must be < high")

    @property
    def dim(self) -> int:
        return len(self.low)

    def contains(self, action: np.ndarray, atol: float = 1e-9) -> bool:
        a = np.asarray(action, dtype=np.float64)
        if a.shape != (self.dim,):
            return False
        lo = np.asarray(self.low) - atol
        hi = np.asarray(self.high) + atol
        return bool(np.all(a >= lo) and np.all(a <= hi))


ActionSpace = Union[DiscreteSpace, BoxSpace]


@dataclass(frozen=True)
class EnvSpec:
    """Static description of an environment instance."""

    state_dim: int
    action_space: ActionSpace
    gamma: float
    max_steps: int
    feature_names: tuple

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.max_steps <= 0:
            raise ConfigError(f"max_steps must be positive, got {self.max_steps}")
        if len(self.feature_names) != self.state_dim:
            raise ConfigError(
                f"feature_names has {len(self.feature_names)} entries "
                f"for state_dim {self.state_dim}"
            )


class EnvObservation:
    """State vector plus the schema needed to read it by feature name."""

    __slots__ = ("vector", "_names")

    def __init__(self, vector: np.ndarray, feature_names: Sequence[str]):
        self.vector = np.asarray(vector, dtype=np.float64)
        self._names = tuple(feature_names)
        if self.vector.shape != (len(self._names),):
            raise ContractError(
                f"observation vector shape {self.vector.shape} does not match "
                f"{len(self._names)} feature names"
            )

    @property
    def feature_names(self) -> tuple:
        return self._names

    def named(self) -> dict:
        return dict(zip(self._names, self.vector.tolist()))

    def __getitem__(self, name: str) -> float:
        try:
            return float(self.vector[self._names.index(name)])
        except ValueError:
            raise UnknownFeatureError(f"feature {name!r} not in observation schema") from None


@dataclass
class Transition:
    """One (s, a, r, s', done) record with its position in the episode."""

    state: np.ndarray
    action: object
    reward: float
    next_state: np.ndarray
    done: bool
    step_index: int


@dataclass
class Episode:
    """Ordered transitions from one rollout plus bookkeeping."""

    transitions: list = field(default_factory=list)
    total_reward: float = 0.0
    seed: Optional[int] = None

    def __len__(self) -> int:
        return len(self.transitions)

    @property
    def rewards(self) -> list:
        return [t.reward for t in self.transitions]


def compute_return(rewards: Sequence[float], gamma: float) -> float:
    """Discounted return sum_k gamma^k * r_k of a reward sequence."""
    if not 0.0 <= gamma <= 1.0:
        raise ConfigError(f"gamma must be in [0, 1], got {gamma}")
    total = 0.0
    discount = 1.0
    for r in rewards:
        total += discount * float(r)
        discount *= gamma
    return total


def run_episode(
    env,
    policy: Callable[[EnvObservation], object],
    seed: Optional[int] = None,
    reward_fn: Optional[Callable[[dict], float]] = None,
) -> Episode:
    """Roll out one episode, optionally overriding the env reward.

    `reward_fn` maps the post-step feature dict to a scalar and replaces
    the built-in reward signal. If it advertises `feature_names`, those
    are checked against the env schema before the first step.
    """
    spec = env.spec
    if reward_fn is not None:
        needed = getattr(reward_fn, "feature_names", None)
        if needed is not None:
            missing = [n for n in needed if n not in spec.feature_names]
            if missing:
                raise UnknownFeatureError(
                    f"reward function references unknown features: {missing}"
                )

    obs = env.reset(seed=seed)
    episode = Episode(seed=seed)
    for t in range(spec.max_steps):
        action = policy(obs)
        next_obs, env_reward, done = env.step(action)
        reward = float(reward_fn(next_obs.named())) if reward_fn else float(env_reward)
        episode.transitions.append(
            Transition(
                state=obs.vector.copy(),
                action=action,
                reward=reward,
                next_state=next_obs.vector.copy(),
                done=bool(done),
                step_index=t,
            )
        )
        episode.total_reward += reward
        obs = next_obs
        if done:
            break
    else:
        raise ContractError(
            f"environment did not signal done within max_steps={spec.max_steps}"
        )
    return episode
