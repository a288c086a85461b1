"""Twin-critic variant of the deterministic actor-critic.

Three changes over the single-critic version: clipped double-Q targets,
smoothing noise on the target action, and a delayed actor update.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nn import Adam, Mlp, ReplayBuffer, polyak_update
from .base import ActionBounds, check_finite


@dataclass
class Td3Config:
    hidden: tuple = (64, 64)
    actor_lr: float = 1e-3
    critic_lr: float = 1e-3
    gamma: float = 0.99
    batch_size: int = 64
    buffer_capacity: int = 100_000
    tau: float = 0.01
    noise_scale: float = 0.1  # exploration stddev, fraction of action radius
    smoothing_scale: float = 0.2  # target smoothing stddev, same units
    smoothing_clip: float = 0.5
    policy_delay: int = 2
    clip_norm: float = 10.0
    seed: int = 0


class Td3Agent:
    def __init__(self, state_dim: int, low, high, config: Td3Config | None = None):
        cfg = config or Td3Config()
        self.config = cfg
        self.bounds = ActionBounds(low, high)
        a_dim = self.bounds.dim
        n_hidden = len(cfg.hidden)
        self.actor = Mlp(
            [state_dim, *cfg.hidden, a_dim],
            ["relu"] * n_hidden + ["tanh"],
            seed=cfg.seed,
        )
        self.critics = [
            Mlp([state_dim + a_dim, *cfg.hidden, 1], seed=cfg.seed + 1 + i)
            for i in range(2)
        ]
        self.actor_target = self.actor.clone()
        self.critic_targets = [c.clone() for c in self.critics]
        self.actor_opt = Adam(self.actor, lr=cfg.actor_lr, clip_norm=cfg.clip_norm)
        self.critic_opts = [
            Adam(c, lr=cfg.critic_lr, clip_norm=cfg.clip_norm) for c in self.critics
        ]
        self.buffer = ReplayBuffer(
            cfg.buffer_capacity, state_dim, action_shape=(a_dim,), seed=cfg.seed + 101
        )
        self._rng = np.random.Generator(np.random.PCG64(cfg.seed + 202))
        self.state_dim = state_dim
        self.train_calls = 0
        self.actor_updates = 0

    def select_action(self, state, *, noise_scale: float | None = None) -> np.ndarray:
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

    def _smoothed_target_action(self, next_states) -> np.ndarray:
        cfg = self.config
        t = self.actor_target.forward_batch(next_states)
        action = self.bounds.squash(t)
        noise = self._rng.normal(
            0.0, cfg.smoothing_scale * self.bounds.radius, size=action.shape
        )
        lim = cfg.smoothing_clip * self.bounds.radius
        return self.bounds.clip(action + np.clip(noise, -lim, lim))

    def train_step(self) -> dict:
        cfg = self.config
        if len(self.buffer) < cfg.batch_size:
            return {"status": "skipped"}
        batch = self.buffer.sample(cfg.batch_size)
        b = cfg.batch_size

        next_a = self._smoothed_target_action(batch.next_states)
        x2 = np.hstack([batch.next_states, next_a])
        q2 = np.minimum(
            self.critic_targets[0].forward_batch(x2)[:, 0],
            self.critic_targets[1].forward_batch(x2)[:, 0],
        )
        targets = batch.rewards + cfg.gamma * (1.0 - batch.dones) * q2

        x = np.hstack([batch.states, batch.actions])
        losses = []
        for critic, opt in zip(self.critics, self.critic_opts):
            q = critic.forward_batch(x, keep_cache=True)[:, 0]
            err = q - targets
            losses.append(
                check_finite(
                    float(np.mean(err * err)),
                    "critic TD loss",
                    {"train_calls": self.train_calls, "lr": opt.lr},
                )
            )
            opt.step(critic.backward(x, (2.0 * err / b)[:, None]))

        summary = {"status": "ok", "critic_loss": float(np.mean(losses))}
        self.train_calls += 1
        if self.train_calls % cfg.policy_delay == 0:
            summary["actor_q"] = self._update_actor(batch)
            self.actor_updates += 1
            polyak_update(self.actor_target, self.actor, cfg.tau)
            for tgt, src in zip(self.critic_targets, self.critics):
                polyak_update(tgt, src, cfg.tau)
        return summary

    def _update_actor(self, batch) -> float:
        b = self.config.batch_size
        t = self.actor.forward_batch(batch.states, keep_cache=True)
        actions = self.bounds.squash(t)
        x = np.hstack([batch.states, actions])
        q = self.critics[0].forward_batch(x, keep_cache=True)
        grad_q = np.full((b, 1), -1.0 / b)
        _, grad_x = self.critics[0].backward(x, grad_q, need_input_grad=True)
        grad_action = grad_x[:, self.state_dim :]
        self.actor_opt.step(self.actor.backward(batch.states, grad_action * self.bounds.radius))
        return float(q.mean())

    def apply_hyperparams(self, values: dict) -> None:
        if "learning_rate" in values:
            self.actor_opt.lr = float(values["learning_rate"])
            for opt in self.critic_opts:
                opt.lr = float(values["learning_rate"])
        if "tau" in values:
            self.config.tau = float(values["tau"])
        if "batch_size" in values:
            self.config.batch_size = int(values["batch_size"])
