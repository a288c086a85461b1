"""Deep Q-learning over a discrete action set with optional legality masks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InfeasibleActionError, ShapeError
from ..nn import Adam, Mlp, ReplayBuffer, polyak_update
from .base import check_finite


@dataclass
class DqnConfig:
    hidden: tuple = (64, 64)
    lr: float = 1e-3
    gamma: float = 0.99
    batch_size: int = 64
    buffer_capacity: int = 50_000
    tau: float = 0.01
    clip_norm: float = 10.0
    seed: int = 0


class DqnAgent:
    """Q-network plus target twin; the caller drives exploration epsilon."""

    def __init__(self, state_dim: int, n_actions: int, config: DqnConfig | None = None):
        cfg = config or DqnConfig()
        if n_actions < 2:
            raise ShapeError(f"need at least two actions, got {n_actions}")
        self.config = cfg
        self.n_actions = n_actions
        self.q = Mlp([state_dim, *cfg.hidden, n_actions], seed=cfg.seed)
        self.q_target = self.q.clone()
        self.opt = Adam(self.q, lr=cfg.lr, clip_norm=cfg.clip_norm)
        self.buffer = ReplayBuffer(cfg.buffer_capacity, state_dim, seed=cfg.seed + 101)
        self._rng = np.random.Generator(np.random.PCG64(cfg.seed + 202))
        self.train_calls = 0

    def select_action(self, state, *, epsilon: float = 0.0, mask=None) -> int:
        """Epsilon-greedy pick; masked-out actions are never returned."""
        if mask is None:
            legal = np.ones(self.n_actions, dtype=bool)
        else:
            legal = np.asarray(mask, dtype=bool)
            if legal.shape != (self.n_actions,):
                raise ShapeError(f"mask must have shape ({self.n_actions},)")
        choices = np.flatnonzero(legal)
        if choices.size == 0:
            raise InfeasibleActionError("every action is masked out")
        if epsilon > 0.0 and self._rng.random() < epsilon:
            return int(self._rng.choice(choices))
        values = self.q.forward(np.asarray(state, dtype=np.float64))
        values = np.where(legal, values, -np.inf)
        return int(np.argmax(values))

    def record(self, state, action, reward, next_state, done) -> None:
        self.buffer.add(state, action, reward, next_state, done)

    def train_step(self) -> dict:
        cfg = self.config
        if len(self.buffer) < cfg.batch_size:
            return {"status": "skipped"}
        batch = self.buffer.sample(cfg.batch_size)
        actions = batch.actions.astype(np.int64)

        next_q = self.q_target.forward_batch(batch.next_states).max(axis=1)
        targets = batch.rewards + cfg.gamma * (1.0 - batch.dones) * next_q

        q_all = self.q.forward_batch(batch.states, keep_cache=True)
        rows = np.arange(cfg.batch_size)
        taken = q_all[rows, actions]
        err = taken - targets
        loss = check_finite(
            float(np.mean(err * err)),
            "DQN TD loss",
            {"train_calls": self.train_calls, "lr": self.opt.lr},
        )

        grad_out = np.zeros_like(q_all)
        grad_out[rows, actions] = 2.0 * err / cfg.batch_size
        self.opt.step(self.q.backward(batch.states, grad_out))
        polyak_update(self.q_target, self.q, cfg.tau)
        self.train_calls += 1
        return {"status": "ok", "loss": loss, "q_mean": float(taken.mean())}

    def apply_hyperparams(self, values: dict) -> None:
        """Adopt whichever whitelisted knobs this agent understands."""
        if "learning_rate" in values:
            self.opt.lr = float(values["learning_rate"])
        if "tau" in values:
            self.config.tau = float(values["tau"])
        if "batch_size" in values:
            self.config.batch_size = int(values["batch_size"])
