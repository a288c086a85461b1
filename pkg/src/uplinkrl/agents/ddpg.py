"""Deterministic actor-critic for bounded continuous actions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nn import Adam, Mlp, ReplayBuffer, polyak_update
from .base import ActionBounds, check_finite


@dataclass
class DdpgConfig:
    hidden: tuple = (64, 64)
    actor_lr: float = 1e-3
    critic_lr: float = 1e-3
    gamma: float = 0.99
    batch_size: int = 64
    buffer_capacity: int = 100_000
    tau: float = 0.01
    noise_scale: float = 0.1  # stddev as a fraction of the action radius
    clip_norm: float = 10.0
    seed: int = 0


class DdpgAgent:
    """Single critic, tanh-squashed deterministic actor, Gaussian exploration."""

    def __init__(self, state_dim: int, low, high, config: DdpgConfig | None = None):
        cfg = config or DdpgConfig()
        self.config = cfg
        self.bounds = ActionBounds(low, high)
        a_dim = self.bounds.dim
        n_hidden = len(cfg.hidden)
        self.actor = Mlp(
            [state_dim, *cfg.hidden, a_dim],
            ["relu"] * n_hidden + ["tanh"],
            seed=cfg.seed,
        )
        self.critic = Mlp([state_dim + a_dim, *cfg.hidden, 1], seed=cfg.seed + 1)
        self.actor_target = self.actor.clone()
        self.critic_target = self.critic.clone()
        self.actor_opt = Adam(self.actor, lr=cfg.actor_lr, clip_norm=cfg.clip_norm)
        self.critic_opt = Adam(self.critic, lr=cfg.critic_lr, clip_norm=cfg.clip_norm)
        self.buffer = ReplayBuffer(
            cfg.buffer_capacity, state_dim, action_shape=(a_dim,), seed=cfg.seed + 101
        )
        self._rng = np.random.Generator(np.random.PCG64(cfg.seed + 202))
        self.state_dim = state_dim
        self.train_calls = 0

    def select_action(self, state, *, noise_scale: float | None = None) -> np.ndarray:
        """Actor output plus optional Gaussian noise, clipped to bounds."""
        scale = self.config.noise_scale if noise_scale is None else noise_scale
        t = self.actor.forward(np.asarray(state, dtype=np.float64))
        action = self.bounds.squash(t)
        if scale > 0.0:
            action = action + self._rng.normal(
                0.0, scale * self.bounds.radius, size=self.bounds.dim
            )
        return self.bounds.clip(action)

    def record(self, state, action, reward, next_state, done) -> None:
        self.buffer.add(state, action, reward, next_state, done)

    def _critic_targets(self, batch) -> np.ndarray:
        next_t = self.actor_target.forward_batch(batch.next_states)
        next_a = self.bounds.squash(next_t)
        q2 = self.critic_target.forward_batch(
            np.hstack([batch.next_states, next_a])
        )[:, 0]
        return batch.rewards + self.config.gamma * (1.0 - batch.dones) * q2

    def _update_critic(self, batch, targets) -> float:
        b = self.config.batch_size
        x = np.hstack([batch.states, batch.actions])
        q = self.critic.forward_batch(x, keep_cache=True)[:, 0]
        err = q - targets
        loss = check_finite(
            float(np.mean(err * err)),
            "critic TD loss",
            {"train_calls": self.train_calls, "lr": self.critic_opt.lr},
        )
        grad_out = (2.0 * err / b)[:, None]
        self.critic_opt.step(self.critic.backward(x, grad_out))
        return loss

    def _update_actor(self, batch) -> float:
        b = self.config.batch_size
        t = self.actor.forward_batch(batch.states, keep_cache=True)
        actions = self.bounds.squash(t)
        x = np.hstack([batch.states, actions])
        q = self.critic.forward_batch(x, keep_cache=True)
        # maximizing mean Q: the loss gradient at the critic output is -1/B
        grad_q = np.full((b, 1), -1.0 / b)
        _, grad_x = self.critic.backward(x, grad_q, need_input_grad=True)
        grad_action = grad_x[:, self.state_dim :]
        # chain through the affine part of the squash; tanh lives in the actor
        self.actor_opt.step(self.actor.backward(batch.states, grad_action * self.bounds.radius))
        return float(q.mean())

    def train_step(self) -> dict:
        cfg = self.config
        if len(self.buffer) < cfg.batch_size:
            return {"status": "skipped"}
        batch = self.buffer.sample(cfg.batch_size)
        critic_loss = self._update_critic(batch, self._critic_targets(batch))
        actor_q = self._update_actor(batch)
        polyak_update(self.actor_target, self.actor, cfg.tau)
        polyak_update(self.critic_target, self.critic, cfg.tau)
        self.train_calls += 1
        return {"status": "ok", "critic_loss": critic_loss, "actor_q": actor_q}

    def apply_hyperparams(self, values: dict) -> None:
        if "learning_rate" in values:
            self.actor_opt.lr = float(values["learning_rate"])
            self.critic_opt.lr = float(values["learning_rate"])
        if "tau" in values:
            self.config.tau = float(values["tau"])
        if "batch_size" in values:
            self.config.batch_size = int(values["batch_size"])
