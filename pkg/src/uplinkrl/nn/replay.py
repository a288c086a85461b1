"""Fixed-capacity FIFO transition store with uniform sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError, UsageError


@dataclass
class Batch:
    """Column-major minibatch; actions keep whatever shape was inserted."""

    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    dones: np.ndarray


class ReplayBuffer:
    """Ring buffer over preallocated arrays.

    Once full, every insert overwrites the oldest record. `action_shape`
    is () for discrete actions, (d,) for continuous ones.
    """

    def __init__(self, capacity: int, state_dim: int, action_shape=(), *, seed: int = 0):
        if capacity <= 0:
            raise ShapeError(f"capacity must be positive, got {capacity}")
        self.capacity = int(capacity)
        self._states = np.zeros((capacity, state_dim))
        self._next_states = np.zeros((capacity, state_dim))
        action_shape = tuple(action_shape)
        if action_shape == ():
            self._actions = np.zeros(capacity, dtype=np.int64)
        else:
            self._actions = np.zeros((capacity, *action_shape))
        self._rewards = np.zeros(capacity)
        self._dones = np.zeros(capacity)
        self._head = 0
        self._size = 0
        self._rng = np.random.Generator(np.random.PCG64(seed))

    def __len__(self) -> int:
        return self._size

    def add(self, state, action, reward, next_state, done) -> None:
        i = self._head
        self._states[i] = state
        self._actions[i] = action
        self._rewards[i] = reward
        self._next_states[i] = next_state
        self._dones[i] = 1.0 if done else 0.0
        self._head = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int) -> Batch:
        """Uniform sample with replacement from the stored records."""
        if self._size == 0:
            raise UsageError("cannot sample from an empty buffer")
        idx = self._rng.integers(0, self._size, size=batch_size)
        return Batch(
            states=self._states[idx].copy(),
            actions=self._actions[idx].copy(),
            rewards=self._rewards[idx].copy(),
            next_states=self._next_states[idx].copy(),
            dones=self._dones[idx].copy(),
        )
