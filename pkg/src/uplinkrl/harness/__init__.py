"""Experiment harness: configs, the training loop, summaries, and the CLI."""

from .config import ExperimentConfig, load_config
from .runner import RunResult, build_agent, build_env, run_experiment, run_training
from .summary import (
    compare_dirs,
    comparison_csv,
    convergence_episode,
    default_window,
    final_window_mean,
    sign_test_p,
    summarize,
)

__all__ = [
    "ExperimentConfig",
    "load_config",
    "RunResult",
    "build_agent",
    "build_env",
    "run_experiment",
    "run_training",
    "compare_dirs",
    "comparison_csv",
    "convergence_episode",
    "default_window",
    "final_window_mean",
    "sign_test_p",
    "summarize",
]
