"""Tiny deterministic chain MDP with an exact dynamic-programming solution.

Five states in a row; action 1 moves right, action 0 moves left (state 0
bounces). Entering the last state pays +1 and ends the episode, every
other move costs 0.05. Small enough that value iteration gives Q* to
machine precision, which makes it a learning oracle for Q-learners.
"""

import numpy as np

from uplinkrl.mdp import DiscreteSpace, EnvObservation, EnvSpec

N_STATES = 5
GOAL = N_STATES - 1
STEP_COST = -0.05
GOAL_REWARD = 1.0
GAMMA = 0.9
HORIZON = 50

FEATURES = tuple(f"s{i}" for i in range(N_STATES))


def transition(state: int, action: int):
    """Deterministic dynamics: (next_state, reward, done)."""
    nxt = min(state + 1, GOAL) if action == 1 else max(state - 1, 0)
    if nxt == GOAL:
        return nxt, GOAL_REWARD, True
    return nxt, STEP_COST, False


class ChainEnv:
    spec = EnvSpec(
        state_dim=N_STATES,
        action_space=DiscreteSpace(2),
        gamma=GAMMA,
        max_steps=HORIZON,
        feature_names=FEATURES,
    )

    def __init__(self):
        self.state = None

    def _observe(self):
        vec = np.zeros(N_STATES)
        vec[self.state] = 1.0
        return EnvObservation(vec, FEATURES)

    def reset(self, seed=None):
        self.state = 0
        self._steps = 0
        return self._observe()

    def step(self, action):
        self.state, reward, done = transition(self.state, int(action))
        self._steps += 1
        return self._observe(), reward, done or self._steps >= HORIZON


def value_iteration(tol: float = 1e-10) -> np.ndarray:
    """Exact Q* of shape (N_STATES, 2); the goal row stays zero (absorbing)."""
    q = np.zeros((N_STATES, 2))
    while True:
        prev = q.copy()
        for s in range(GOAL):
            for a in (0, 1):
                nxt, r, done = transition(s, a)
                q[s, a] = r + (0.0 if done else GAMMA * prev[nxt].max())
        if np.abs(q - prev).max() < tol:
            return q
