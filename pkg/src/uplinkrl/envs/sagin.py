"""Space-air-ground downlink with a two-part action.

Each slot the agent picks a relay satellite (discrete, only currently
visible ones are legal) and splits the RF subcarrier budget over the
ground clusters (continuous simplex). The backhaul is an optical feeder
link with a per-satellite capacity; the delivered volume is the smaller
of the feeder capacity and the summed RF throughput. Switching relays
costs a handover penalty.

Visibility follows per-satellite sinusoidal elevation tracks. The
constellation is checked at construction so at least one satellite is
visible on every slot of the horizon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, ContractError, InfeasibleActionError
from ..mdp import BoxSpace, EnvObservation, EnvSpec


@dataclass
class ExplorationSchedule:
    """Linearly decaying exploration rate with a hard floor at zero.

    epsilon(e) = max(eps0 * (1 - e / (decay_fraction * total_episodes)), 0)
    """

    eps0: float = 1.0
    decay_fraction: float = 0.7
    total_episodes: int = 400

    def __post_init__(self):
        if not 0.0 <= self.eps0 <= 1.0:
            raise ConfigError(f"eps0 must lie in [0, 1], got {self.eps0}")
        if self.decay_fraction <= 0.0:
            raise ConfigError("decay_fraction must be positive")
        if self.total_episodes <= 0:
            raise ConfigError("total_episodes must be positive")

    def epsilon(self, episode: int) -> float:
        span = self.decay_fraction * self.total_episodes
        return max(self.eps0 * (1.0 - episode / span), 0.0)


@dataclass(frozen=True)
class SaginAction:
    """Decoded action: relay index plus RF allocation over clusters."""

    satellite: int
    fractions: np.ndarray


def decode_action(u, visible_mask):
    """Map a raw box vector onto (satellite, allocation).

    The first K entries are satellite preference logits; invisible
    satellites are masked out before the argmax. The last C entries go
    through a softmax to form the allocation simplex.
    """
    u = np.asarray(u, dtype=np.float64)
    mask = np.asarray(visible_mask, dtype=bool)
    k = mask.shape[0]
    if u.ndim != 1 or u.shape[0] <= k:
        raise ContractError(
            f"need a flat vector longer than {k} entries, got shape {u.shape}"
        )
    if not mask.any():
        raise InfeasibleActionError("no satellite is visible; cannot decode")
    logits = np.where(mask, u[:k], -np.inf)
    satellite = int(np.argmax(logits))
    z = u[k:] - np.max(u[k:])
    expz = np.exp(z)
    return SaginAction(satellite=satellite, fractions=expz / expz.sum())


@dataclass
class SaginScenario:
    """Constellation geometry, channel constants, and reward weights."""

    n_satellites: int = 6
    n_clusters: int = 4
    horizon: int = 100
    period: int = 40  # slots per elevation cycle
    elevation_threshold: float = 0.15
    fso_lo: float = 15.0
    fso_hi: float = 35.0
    n_subcarriers: int = 16
    bandwidth: float = 1.0
    tx_power: float = 1.0
    noise_power: float = 1.0
    gain_init_lo: float = 0.5
    gain_init_hi: float = 2.0
    gain_walk: float = 0.25
    gain_clip: tuple = (0.1, 10.0)
    handover_cost: float = 0.1
    reward_scale: float = 25.0
    gamma: float = 0.95
    scenario_seed: int = 0

    def __post_init__(self):
        if self.n_satellites <= 0 or self.n_clusters <= 0 or self.horizon <= 0:
            raise ConfigError("satellite, cluster, and horizon counts must be positive")
        if not 0.0 < self.elevation_threshold < 1.0:
            raise ConfigError("elevation_threshold must sit strictly inside (0, 1)")
        if self.gain_clip[0] <= 0.0 or self.gain_clip[0] >= self.gain_clip[1]:
            raise ConfigError(f"bad gain_clip window {self.gain_clip}")


class SaginWorld:
    """Stateful downlink environment over one constellation."""

    def __init__(self, scenario: SaginScenario | None = None):
        self.scenario = scenario or SaginScenario()
        s = self.scenario
        rng = np.random.Generator(np.random.PCG64(s.scenario_seed))
        # evenly staggered phases keep the coverage gapless; capacities are
        # a fixed property of each feeder link
        self.phases = np.arange(s.n_satellites) * (s.period / s.n_satellites)
        self.fso_capacity = rng.uniform(s.fso_lo, s.fso_hi, size=s.n_satellites)
        for t in range(s.horizon):
            if not self.visible_mask(t).any():
                raise ConfigError(
                    f"constellation leaves slot {t} uncovered; "
                    "adjust period, phases, or the elevation threshold"
                )

        k, c = s.n_satellites, s.n_clusters
        names = [f"vis_{i}" for i in range(k)]
        names += [f"cap_{i}" for i in range(k)]
        names += [f"gain_{j}" for j in range(c)]
        names += [f"prev_{i}" for i in range(k)]
        names += ["slot_frac"]
        self.spec = EnvSpec(
            state_dim=len(names),
            action_space=BoxSpace(low=[-1.0] * (k + c), high=[1.0] * (k + c)),
            gamma=s.gamma,
            max_steps=s.horizon,
            feature_names=tuple(names),
        )
        self._slot = None

    def elevation(self, sat: int, slot: int) -> float:
        s = self.scenario
        return float(np.sin(2.0 * np.pi * (slot + self.phases[sat]) / s.period))

    def visible_mask(self, slot: int) -> np.ndarray:
        s = self.scenario
        els = np.sin(
            2.0 * np.pi * (slot + self.phases) / s.period
        )
        return els > s.elevation_threshold

    def rf_throughput(self, fractions) -> float:
        s = self.scenario
        snr = s.tx_power * self._gains / s.noise_power
        per_cluster = np.asarray(fractions) * s.n_subcarriers * s.bandwidth * np.log2(1.0 + snr)
        return float(per_cluster.sum())

    def _observe(self) -> EnvObservation:
        s = self.scenario
        prev = np.zeros(s.n_satellites)
        if self._prev_sat >= 0:
            prev[self._prev_sat] = 1.0
        vec = np.concatenate(
            [
                self.visible_mask(self._slot).astype(np.float64),
                self.fso_capacity / s.fso_hi,
                self._gains / s.gain_clip[1],
                prev,
                [self._slot / s.horizon],
            ]
        )
        return EnvObservation(vec, self.spec.feature_names)

    def reset(self, seed=None) -> EnvObservation:
        s = self.scenario
        self._rng = np.random.Generator(np.random.PCG64(0 if seed is None else seed))
        self._gains = self._rng.uniform(s.gain_init_lo, s.gain_init_hi, size=s.n_clusters)
        self._slot = 0
        self._prev_sat = -1  # first pick is free of handover cost
        self._done = False
        self.delivered_total = 0.0
        self.handovers = 0
        return self._observe()

    def step(self, action: SaginAction):
        if self._slot is None or self._done:
            raise ContractError("step() before reset(), or after the episode ended")
        s = self.scenario
        mask = self.visible_mask(self._slot)
        sat = int(action.satellite)
        if not 0 <= sat < s.n_satellites:
            raise ContractError(f"satellite index {sat} out of range")
        if not mask[sat]:
            raise ContractError(
                f"satellite {sat} is below the elevation threshold on slot {self._slot}"
            )
        f = np.asarray(action.fractions, dtype=np.float64)
        if f.shape != (s.n_clusters,):
            raise ContractError(f"allocation must have {s.n_clusters} entries")
        if np.any(f < -1e-9) or abs(f.sum() - 1.0) > 1e-6:
            raise ContractError("allocation must be a simplex point")

        rf = self.rf_throughput(f)
        fso = float(self.fso_capacity[sat])
        delivered = min(fso, rf)
        assert delivered <= fso + 1e-12 and delivered <= rf + 1e-12

        switched = self._prev_sat >= 0 and sat != self._prev_sat
        if switched:
            self.handovers += 1
        reward = delivered / s.reward_scale - s.handover_cost * float(switched)
        self.delivered_total += delivered

        self._gains = np.clip(
            self._gains + self._rng.uniform(-s.gain_walk, s.gain_walk, size=s.n_clusters),
            s.gain_clip[0],
            s.gain_clip[1],
        )
        self._prev_sat = sat
        self._slot += 1
        self._done = self._slot >= s.horizon
        return self._observe(), reward, self._done
