"""Simulation environments: UAV energy world and SAGIN downlink."""

from .sagin import (
    ExplorationSchedule,
    SaginAction,
    SaginScenario,
    SaginWorld,
    decode_action,
)
from .uav import UavScenario, UavWorld, enriched_reward_source, manual_reward_source

__all__ = [
    "ExplorationSchedule",
    "SaginAction",
    "SaginScenario",
    "SaginWorld",
    "decode_action",
    "UavScenario",
    "UavWorld",
    "enriched_reward_source",
    "manual_reward_source",
]
