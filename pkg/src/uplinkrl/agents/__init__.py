"""Learning agents: value-based and actor-critic families."""

from .base import ActionBounds
from .ddpg import DdpgAgent, DdpgConfig
from .dqn import DqnAgent, DqnConfig
from .td3 import Td3Agent, Td3Config
from .tqc import TqcAgent, TqcConfig, tqc_truncated_target, truncated_atoms

__all__ = [
    "ActionBounds",
    "DdpgAgent",
    "DdpgConfig",
    "DqnAgent",
    "DqnConfig",
    "Td3Agent",
    "Td3Config",
    "TqcAgent",
    "TqcConfig",
    "tqc_truncated_target",
    "truncated_atoms",
]
