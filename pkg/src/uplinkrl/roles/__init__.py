"""LLM roles around the training loop: designer, guider, sampler, perceiver."""

from .designer import DesignOutcome, RewardCandidate, design_reward
from .guider import (
    GUIDANCE_INTERVAL,
    HISTORY_WINDOW,
    ROLLBACK_TOLERANCE,
    GuidanceDirective,
    GuidanceReport,
    RollbackController,
    check_rollback,
    guide,
)
from .hyperparams import HyperparamEntry, HyperparamSet, default_guided_set
from .perceiver import perceive, summary_features
from .sampler import generate_probe_samples, lattice_grid

__all__ = [
    "DesignOutcome",
    "GUIDANCE_INTERVAL",
    "GuidanceDirective",
    "GuidanceReport",
    "HISTORY_WINDOW",
    "HyperparamEntry",
    "HyperparamSet",
    "ROLLBACK_TOLERANCE",
    "RewardCandidate",
    "RollbackController",
    "check_rollback",
    "default_guided_set",
    "design_reward",
    "generate_probe_samples",
    "guide",
    "lattice_grid",
    "perceive",
    "summary_features",
]
