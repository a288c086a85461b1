"""UAV data-collection world with an explicit per-step energy ledger.

One agent flies over a square service area holding a set of ground
terminals. Each slot it picks a velocity; flying costs energy quadratic
in speed, loitering costs a fixed hover charge, and collecting from
terminals inside the collection radius costs energy per collected unit.
The learning objective is to keep the energy ledger small.

Feature conventions (also the reward schema):
- `energy` is the last step's ledger total divided by `energy_scale`,
  so rewards stay O(1); telemetry keeps raw joules.
- `penalty` is 1 normally, 2 after a boundary violation or when the
  battery falls under 10% of its initial charge.
- `position_score` is 1 / (1 + d) with d the distance to the terminal
  centroid in units of the area diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, ContractError
from ..mdp import BoxSpace, EnvObservation, EnvSpec


@dataclass
class UavScenario:
    """Static description of one service area and its physics constants."""

    area_size: float = 1000.0
    n_terminals: int = 10
    v_max: float = 50.0
    collect_radius: float = 50.0
    c_move: float = 0.5  # J per (m/slot)^2
    c_hover: float = 1.0  # J per hovering slot
    c_tx: float = 0.1  # J per collected unit
    horizon: int = 200
    initial_battery: float = 20000.0
    battery_critical_frac: float = 0.1
    energy_scale: float = 100.0
    hover_speed: float = 2.0  # below this speed the UAV loiters and collects
    start_frac: float = 0.5  # start is drawn uniformly from this central fraction
    gamma: float = 0.9
    # reward weights: manual form is -w * energy * penalty, the enriched form
    # subtracts w2 * position_score from w1 * energy inside the parentheses
    w: float = 1.0
    w1: float = 1.0
    w2: float = 0.5
    scenario_seed: int = 0

    def __post_init__(self):
        if self.n_terminals <= 0 or self.horizon <= 0:
            raise ConfigError("n_terminals and horizon must be positive")
        if min(self.area_size, self.v_max, self.initial_battery, self.energy_scale) <= 0:
            raise ConfigError("area_size, v_max, initial_battery, energy_scale must be positive")
        if not 0.0 < self.start_frac <= 1.0:
            raise ConfigError(f"start_frac must be in (0, 1], got {self.start_frac}")


def enriched_reward_source(scenario: UavScenario) -> str:
    """The scripted enriched reward as expression-language source."""
    return (
        f"-({scenario.w1!r} * energy - {scenario.w2!r} * position_score) * penalty"
    )


def manual_reward_source(scenario: UavScenario) -> str:
    """The baseline hand-written reward as expression-language source."""
    return f"-{scenario.w!r} * energy * penalty"


class UavWorld:
    """Stateful environment; reset(seed) draws the start position only.

    The terminal layout is fixed by the scenario seed at construction so
    all episodes of a run share one map.
    """

    def __init__(self, scenario: UavScenario | None = None):
        self.scenario = scenario or UavScenario()
        s = self.scenario
        layout_rng = np.random.Generator(np.random.PCG64(s.scenario_seed))
        margin = min(s.collect_radius, 0.1 * s.area_size)
        self.terminals = layout_rng.uniform(
            margin, s.area_size - margin, size=(s.n_terminals, 2)
        )
        self.centroid = self.terminals.mean(axis=0)
        self._diag = float(np.sqrt(2.0) * s.area_size)

        names = ["ux", "uy", "battery_frac", "energy", "position_score", "penalty"]
        names += [f"fresh_{i}" for i in range(s.n_terminals)]
        self.spec = EnvSpec(
            state_dim=len(names),
            action_space=BoxSpace(low=(-s.v_max, -s.v_max), high=(s.v_max, s.v_max)),
            gamma=s.gamma,
            max_steps=s.horizon,
            feature_names=tuple(names),
        )
        self._pos = None

    # -- helpers -------------------------------------------------------------

    def position_score(self, pos) -> float:
        d = float(np.linalg.norm(np.asarray(pos) - self.centroid)) / self._diag
        return 1.0 / (1.0 + d)

    def feature_ranges(self) -> dict:
        """Admissible feature box, used for probe sampling."""
        s = self.scenario
        max_step_energy = (
            s.c_move * 2 * s.v_max**2 + s.c_hover + s.c_tx * s.n_terminals
        ) / s.energy_scale
        ranges = {
            "ux": (0.0, 1.0),
            "uy": (0.0, 1.0),
            "battery_frac": (0.0, 1.0),
            "energy": (0.0, max_step_energy),
            "position_score": (1.0 / (1.0 + 1.0), 1.0),
            "penalty": (1.0, 2.0),
        }
        for i in range(s.n_terminals):
            ranges[f"fresh_{i}"] = (0.0, 1.0)
        return ranges

    def _observe(self) -> EnvObservation:
        s = self.scenario
        vec = np.concatenate(
            [
                self._pos / s.area_size,
                [
                    self._battery / s.initial_battery,
                    self._last_energy / s.energy_scale,
                    self.position_score(self._pos),
                    self._last_penalty,
                ],
                np.minimum(self._freshness / s.horizon, 1.0),
            ]
        )
        return EnvObservation(vec, self.spec.feature_names)

    # -- env contract ----------------------------------------------------------

    def reset(self, seed=None) -> EnvObservation:
        s = self.scenario
        rng = np.random.Generator(np.random.PCG64(0 if seed is None else seed))
        half = 0.5 * s.area_size
        spread = 0.5 * s.start_frac * s.area_size
        self._pos = rng.uniform(half - spread, half + spread, size=2)
        self._battery = s.initial_battery
        self._freshness = np.zeros(s.n_terminals)
        self._step_count = 0
        self._last_energy = 0.0
        self._last_penalty = 1.0
        self._done = False
        self.ledger = {"move": 0.0, "hover": 0.0, "tx": 0.0}
        return self._observe()

    def step(self, action):
        if self._pos is None or self._done:
            raise ContractError("step() before reset(), or after the episode ended")
        s = self.scenario
        v = np.asarray(action, dtype=np.float64)
        if v.shape != (2,):
            raise ContractError(f"action must be a 2-vector, got shape {v.shape}")
        if not self.spec.action_space.contains(v):
            raise ContractError(f"velocity {v} outside [{-s.v_max}, {s.v_max}]^2")
        speed = float(np.linalg.norm(v))
        if speed > s.v_max:  # box corners exceed the speed cap; rescale
            v = v * (s.v_max / speed)
            speed = s.v_max

        target = self._pos + v
        boundary = bool(np.any(target < 0.0) or np.any(target > s.area_size))
        new_pos = np.clip(target, 0.0, s.area_size)
        hovering = speed < s.hover_speed

        collected_units = 0.0
        if hovering:
            dists = np.linalg.norm(self.terminals - new_pos, axis=1)
            for i in np.flatnonzero(dists <= s.collect_radius):
                collected_units += 1.0
                self._freshness[i] = -1.0  # +1 below brings it to 0

        e_move = s.c_move * speed * speed
        e_hover = s.c_hover if hovering else 0.0
        e_tx = s.c_tx * collected_units
        demand = e_move + e_hover + e_tx

        if demand >= self._battery:
            # spend exactly what remains so the ledger stays conservative
            scale = self._battery / demand if demand > 0.0 else 0.0
            e_move, e_hover, e_tx = e_move * scale, e_hover * scale, e_tx * scale
            demand = self._battery
            self._battery = 0.0
        else:
            self._battery -= demand
        self.ledger["move"] += e_move
        self.ledger["hover"] += e_hover
        self.ledger["tx"] += e_tx

        self._freshness += 1.0
        self._pos = new_pos
        self._step_count += 1

        critical = self._battery < s.battery_critical_frac * s.initial_battery
        self._last_penalty = 2.0 if (boundary or critical) else 1.0
        self._last_energy = demand
        self._done = self._battery <= 0.0 or self._step_count >= s.horizon

        obs = self._observe()
        reward = -s.w * (demand / s.energy_scale) * self._last_penalty
        return obs, reward, self._done

    @property
    def total_energy(self) -> float:
        """Raw joules spent so far this episode."""
        return self.ledger["move"] + self.ledger["hover"] + self.ledger["tx"]
