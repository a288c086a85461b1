"""Truncated-quantile actor-critic for bounded continuous actions.

The critics predict return quantiles instead of a scalar; the target
distribution pools every target critic's quantiles, sorts them, and
throws away the largest few to damp overestimation. The actor is a
tanh-squashed Gaussian trained against the quantile mean with a fixed
entropy weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, ShapeError
from ..nn import Adam, Mlp, ReplayBuffer, polyak_update
from .base import ActionBounds, check_finite

LOG_2PI = float(np.log(2.0 * np.pi))
SQUASH_EPS = 1e-6


def truncated_atoms(quantiles, k_drop: int) -> np.ndarray:
    """Pool quantiles from all critics, sort, drop the k_drop * N largest.

    `quantiles` has shape (..., N, M) for N critics of M quantiles each;
    the result keeps the N*M - k_drop*N smallest atoms in ascending order.
    """
    q = np.asarray(quantiles, dtype=np.float64)
    if q.ndim < 2:
        raise ShapeError(f"expected (..., N, M) quantiles, got shape {q.shape}")
    n, m = q.shape[-2], q.shape[-1]
    if k_drop < 0:
        raise ConfigError(f"k_drop must be non-negative, got {k_drop}")
    drop = k_drop * n
    if drop >= n * m:
        raise ConfigError(
            f"k_drop={k_drop} discards all {n * m} pooled atoms ({n} critics x {m} quantiles)"
        )
    pooled = np.sort(q.reshape(*q.shape[:-2], n * m), axis=-1)
    return pooled[..., : n * m - drop]


def tqc_truncated_target(quantile_sets, k: int) -> float:
    """Truncated value estimate over N critics' quantile vectors.

    Pools the N*M quantiles, sorts ascending, removes the k*N largest, and
    returns the mean of the remainder; k=0 degenerates to the plain mean.
    The mean is accumulated left to right so the result is bit-identical
    to the naive sort-drop-average a reviewer would write by hand.
    """
    kept = truncated_atoms(quantile_sets, k)
    total = 0.0
    for value in kept.tolist():
        total += value
    return total / kept.size


@dataclass
class TqcConfig:
    hidden: tuple = (64, 64)
    actor_lr: float = 3e-4
    critic_lr: float = 3e-4
    gamma: float = 0.95
    batch_size: int = 64
    buffer_capacity: int = 100_000
    tau: float = 0.01
    n_critics: int = 2
    n_quantiles: int = 16
    k_drop: int = 2
    entropy_alpha: float = 0.05
    log_std_lo: float = -5.0
    log_std_hi: float = 2.0
    huber_kappa: float = 1.0
    clip_norm: float = 10.0
    seed: int = 0


class TqcAgent:
    def __init__(self, state_dim: int, low, high, config: TqcConfig | None = None):
        cfg = config or TqcConfig()
        if cfg.k_drop * cfg.n_critics >= cfg.n_critics * cfg.n_quantiles:
            raise ConfigError("k_drop leaves no target atoms")
        self.config = cfg
        self.bounds = ActionBounds(low, high)
        a_dim = self.bounds.dim
        self.actor = Mlp([state_dim, *cfg.hidden, 2 * a_dim], seed=cfg.seed)
        self.critics = [
            Mlp([state_dim + a_dim, *cfg.hidden, cfg.n_quantiles], seed=cfg.seed + 1 + i)
            for i in range(cfg.n_critics)
        ]
        self.critic_targets = [c.clone() for c in self.critics]
        self.actor_opt = Adam(self.actor, lr=cfg.actor_lr, clip_norm=cfg.clip_norm)
        self.critic_opts = [
            Adam(c, lr=cfg.critic_lr, clip_norm=cfg.clip_norm) for c in self.critics
        ]
        self.buffer = ReplayBuffer(
            cfg.buffer_capacity, state_dim, action_shape=(a_dim,), seed=cfg.seed + 101
        )
        self._rng = np.random.Generator(np.random.PCG64(cfg.seed + 202))
        # quantile midpoints (2m - 1) / 2M for m = 1..M
        m = cfg.n_quantiles
        self.tau_grid = (2.0 * np.arange(1, m + 1) - 1.0) / (2.0 * m)
        self.state_dim = state_dim
        self.a_dim = a_dim
        self.train_calls = 0

    # -- policy ----------------------------------------------------------------

    def _policy_stats(self, states, *, keep_cache: bool = False):
        """Split the actor head into mean and clipped log-stddev."""
        cfg = self.config
        out = self.actor.forward_batch(states, keep_cache=keep_cache)
        mu = out[:, : self.a_dim]
        log_std_raw = out[:, self.a_dim :]
        log_std = np.clip(log_std_raw, cfg.log_std_lo, cfg.log_std_hi)
        clip_gate = (log_std_raw > cfg.log_std_lo) & (log_std_raw < cfg.log_std_hi)
        return mu, log_std, clip_gate

    def _sample(self, mu, log_std, xi):
        """Reparameterized draw; returns action, log-prob, and pieces reused
        by the analytic gradient."""
        sigma = np.exp(log_std)
        pre = mu + sigma * xi
        t = np.tanh(pre)
        action = self.bounds.squash(t)
        jac = self.bounds.radius * (1.0 - t * t) + SQUASH_EPS
        log_prob = np.sum(
            -log_std - 0.5 * xi * xi - 0.5 * LOG_2PI - np.log(jac),
            axis=1,
        )
        return action, log_prob, t, sigma

    def select_action(self, state, *, deterministic: bool = False) -> np.ndarray:
        state = np.asarray(state, dtype=np.float64)[None, :]
        mu, log_std, _ = self._policy_stats(state)
        if deterministic:
            return self.bounds.squash(np.tanh(mu[0]))
        xi = self._rng.standard_normal(size=mu.shape)
        action, _, _, _ = self._sample(mu, log_std, xi)
        return action[0]

    def record(self, state, action, reward, next_state, done) -> None:
        self.buffer.add(state, action, reward, next_state, done)

    # -- training ----------------------------------------------------------------

    def _target_atoms(self, batch) -> np.ndarray:
        cfg = self.config
        mu2, log_std2, _ = self._policy_stats(batch.next_states)
        xi2 = self._rng.standard_normal(size=mu2.shape)
        next_a, next_logp, _, _ = self._sample(mu2, log_std2, xi2)
        x2 = np.hstack([batch.next_states, next_a])
        stacked = np.stack(
            [tgt.forward_batch(x2) for tgt in self.critic_targets], axis=1
        )  # (B, N, M)
        kept = truncated_atoms(stacked, cfg.k_drop)  # (B, K)
        soft = kept - cfg.entropy_alpha * next_logp[:, None]
        return batch.rewards[:, None] + cfg.gamma * (1.0 - batch.dones)[:, None] * soft

    def _update_critics(self, batch, atoms) -> float:
        cfg = self.config
        b, kappa = cfg.batch_size, cfg.huber_kappa
        x = np.hstack([batch.states, batch.actions])
        n_kept = atoms.shape[1]
        losses = []
        for critic, opt in zip(self.critics, self.critic_opts):
            q = critic.forward_batch(x, keep_cache=True)  # (B, M)
            u = atoms[:, None, :] - q[:, :, None]  # (B, M, K)
            abs_u = np.abs(u)
            huber = np.where(abs_u <= kappa, 0.5 * u * u, kappa * (abs_u - 0.5 * kappa))
            weight = np.abs(self.tau_grid[None, :, None] - (u < 0.0))
            loss = float(np.mean(weight * huber))
            losses.append(
                check_finite(
                    loss, "quantile critic loss",
                    {"train_calls": self.train_calls, "lr": opt.lr},
                )
            )
            dhuber = np.where(abs_u <= kappa, u, kappa * np.sign(u))
            grad_q = -(weight * dhuber).sum(axis=2) / (b * cfg.n_quantiles * n_kept)
            opt.step(critic.backward(x, grad_q))
        return float(np.mean(losses))

    def _update_actor(self, batch) -> dict:
        cfg = self.config
        b = cfg.batch_size
        mu, log_std, gate = self._policy_stats(batch.states, keep_cache=True)
        xi = self._rng.standard_normal(size=mu.shape)
        actions, log_prob, t, sigma = self._sample(mu, log_std, xi)

        x = np.hstack([batch.states, actions])
        n_total = cfg.n_critics * cfg.n_quantiles
        q_mean = 0.0
        grad_action = np.zeros((b, self.a_dim))
        for critic in self.critics:
            q = critic.forward_batch(x, keep_cache=True)
            q_mean += float(q.mean()) / cfg.n_critics
            grad_q = np.full_like(q, -1.0 / (b * n_total))
            _, grad_x = critic.backward(x, grad_q, need_input_grad=True)
            grad_action += grad_x[:, self.state_dim :]

        # d(action)/d(pre) and d(log pi)/d(pre) for pre = mu + sigma * xi
        da_dpre = self.bounds.radius * (1.0 - t * t)
        jac = da_dpre + SQUASH_EPS
        dlogp_dpre = 2.0 * t * da_dpre / jac
        alpha_term = cfg.entropy_alpha / b
        grad_mu = alpha_term * dlogp_dpre + grad_action * da_dpre
        grad_log_std = (
            alpha_term * (-1.0 + dlogp_dpre * sigma * xi)
            + grad_action * da_dpre * sigma * xi
        ) * gate
        grad_out = np.hstack([grad_mu, grad_log_std])
        self.actor_opt.step(self.actor.backward(batch.states, grad_out))
        entropy = float(-log_prob.mean())
        return {"actor_q": q_mean, "entropy": entropy}

    def train_step(self) -> dict:
        cfg = self.config
        if len(self.buffer) < cfg.batch_size:
            return {"status": "skipped"}
        batch = self.buffer.sample(cfg.batch_size)
        critic_loss = self._update_critics(batch, self._target_atoms(batch))
        actor_stats = self._update_actor(batch)
        for tgt, src in zip(self.critic_targets, self.critics):
            polyak_update(tgt, src, cfg.tau)
        self.train_calls += 1
        return {"status": "ok", "critic_loss": critic_loss, **actor_stats}

    def apply_hyperparams(self, values: dict) -> None:
        cfg = self.config
        if "learning_rate" in values:
            self.actor_opt.lr = float(values["learning_rate"])
            for opt in self.critic_opts:
                opt.lr = float(values["learning_rate"])
        if "entropy_alpha" in values:
            cfg.entropy_alpha = float(values["entropy_alpha"])
        if "tau" in values:
            cfg.tau = float(values["tau"])
        if "batch_size" in values:
            cfg.batch_size = int(values["batch_size"])
        if "truncation_k" in values:
            k = int(values["truncation_k"])
            if k * cfg.n_critics >= cfg.n_critics * cfg.n_quantiles:
                raise ConfigError(f"truncation_k={k} would drop every target atom")
            cfg.k_drop = k
