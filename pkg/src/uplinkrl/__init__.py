"""LLM-assisted reinforcement learning for aerial and satellite networks.

Subpackages: nn (network substrate), mdp (environment contracts), dsl
(reward expression language), llm (chat backends), roles (reward designer
and decision guider), envs (UAV data collection, satellite downlink),
agents (DQN, DDPG, TD3, TQC), harness (experiment runner and CLI).
"""

__version__ = "0.1.0"
