"""Training orchestration: one (config, seed) pair per run directory.

Each run writes three deterministic artifacts next to each other:
episodes.jsonl (one metric row per episode), directives.jsonl (guidance
interventions, only when guidance is on), and summary.json. Wall-clock
time goes into the summary only, so the episode rows can be compared
byte for byte across reruns.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..dsl import compile_reward, parse
from ..envs import (
    ExplorationSchedule,
    SaginScenario,
    SaginWorld,
    UavScenario,
    UavWorld,
    decode_action,
    enriched_reward_source,
)
from ..agents import (
    DdpgAgent,
    DdpgConfig,
    DqnAgent,
    DqnConfig,
    Td3Agent,
    Td3Config,
    TqcAgent,
    TqcConfig,
)
from ..errors import ConfigError
from ..llm import AuditLog, HttpBackend, MockBackend, RuleBackend, extract_json
from ..mdp import DiscreteSpace
from ..roles import (
    HyperparamEntry,
    HyperparamSet,
    RollbackController,
    GuidanceReport,
    design_reward,
    generate_probe_samples,
    guide,
)
from .config import ExperimentConfig


@dataclass
class RunResult:
    seed: int
    out_dir: Path
    summary: dict


# -- construction ---------------------------------------------------------------


def build_env(config: ExperimentConfig):
    kwargs = dict(config.env_kwargs)
    if config.env == "uav":
        return UavWorld(UavScenario(**kwargs))
    return SaginWorld(SaginScenario(**kwargs))


def build_agent(config: ExperimentConfig, env, seed: int):
    kwargs = dict(config.agent_kwargs)
    kwargs["seed"] = seed
    kwargs.setdefault("gamma", env.spec.gamma)
    if "hidden" in kwargs:
        kwargs["hidden"] = tuple(kwargs["hidden"])
    space = env.spec.action_space
    if config.agent == "dqn":
        if not isinstance(space, DiscreteSpace):
            raise ConfigError("dqn needs a discrete action space; use ddpg/td3/tqc here")
        return DqnAgent(env.spec.state_dim, space.n, DqnConfig(**kwargs))
    if isinstance(space, DiscreteSpace):
        raise ConfigError(f"{config.agent} needs a continuous action space")
    cls = {"ddpg": (DdpgAgent, DdpgConfig), "td3": (Td3Agent, Td3Config), "tqc": (TqcAgent, TqcConfig)}
    agent_cls, cfg_cls = cls[config.agent]
    return agent_cls(env.spec.state_dim, space.low, space.high, cfg_cls(**kwargs))


def build_backend(config: ExperimentConfig):
    spec = config.backend
    if spec["kind"] == "http":
        return HttpBackend(spec["base_url"], auth_env=spec.get("auth_env", "UPLINKRL_API_KEY"))
    replies = spec.get("replies")
    if replies is None and spec.get("replies_file"):
        replies = json.loads(Path(spec["replies_file"]).read_text())
    return MockBackend(replies=replies or [])


def _designed_reward_source(config: ExperimentConfig, env, out_dir: Path, audit) -> str:
    """Run the reward-designer pipeline once and return the chosen source."""
    backend = build_backend(config)
    ranges = env.feature_ranges()
    probes = generate_probe_samples(ranges, 64)
    outcome = design_reward(
        backend,
        env.spec.feature_names,
        probes,
        task_description=config.task_description,
        constraints=config.design_constraints,
        audit=audit,
        ledger_path=out_dir / "design_ledger.jsonl",
    )
    return outcome.selected.source


def resolve_reward(config: ExperimentConfig, env, out_dir: Path, audit=None):
    """Returns (callable or None, source string). None keeps the env reward."""
    if config.reward_mode == "manual":
        return None, ""
    if config.reward_mode == "scripted-enriched":
        source = enriched_reward_source(env.scenario)
    elif config.design_expression:
        source = config.design_expression
    else:
        source = _designed_reward_source(config, env, out_dir, audit)
    expr = parse(source, schema=env.spec.feature_names)
    return compile_reward(expr, schema=env.spec.feature_names), source


# -- guidance ----------------------------------------------------------------


def scripted_guidance(request) -> str:
    """Deterministic stand-in for a guidance model.

    Reads the telemetry report embedded in the prompt and anneals the
    entropy weight and learning rate with training progress, leaving the
    rest of the whitelist untouched.
    """
    report = extract_json(request.messages[-1]["content"])
    progress = float(report.get("progress", 0.0))
    current = report.get("hyperparams", {})
    adjustments = []
    if "entropy_alpha" in current:
        target = 0.05 * (0.01 / 0.05) ** progress
        adjustments.append(
            {
                "name": "entropy_alpha",
                "new_value": round(target, 8),
                "rationale": "shrink the entropy bonus as the policy stabilizes",
            }
        )
    if "learning_rate" in current:
        target = 3e-4 * (1e-4 / 3e-4) ** progress
        adjustments.append(
            {
                "name": "learning_rate",
                "new_value": round(target, 10),
                "rationale": "cool the optimizer toward the end of training",
            }
        )
    return json.dumps(
        {"explanation": "progress-based annealing", "adjustments": adjustments}
    )


def guidance_backend_for(config: ExperimentConfig):
    if config.guidance == "off":
        return None
    if config.guidance == "scripted":
        return RuleBackend(scripted_guidance)
    return build_backend(config)


def build_hparam_set(config: ExperimentConfig, agent) -> HyperparamSet:
    """Whitelist seeded from the agent's live values so the first
    intervention measures rate limits against reality."""
    lr = agent.actor_opt.lr if hasattr(agent, "actor_opt") else agent.opt.lr
    batch = agent.config.batch_size
    entries = [
        HyperparamEntry("learning_rate", lr, min(1e-5, lr), max(1e-2, lr)),
        HyperparamEntry(
            "tau", agent.config.tau, min(1e-3, agent.config.tau), max(0.1, agent.config.tau)
        ),
        HyperparamEntry(
            "batch_size", batch, min(16, batch), max(512, batch),
            kind="int", rate="abs", max_step=64,
        ),
        HyperparamEntry("exploration_decay", config.exploration_decay, 0.1, 1.0),
    ]
    if isinstance(agent, TqcAgent):
        entries.append(
            HyperparamEntry("entropy_alpha", agent.config.entropy_alpha, 1e-3, 0.5)
        )
        entries.append(
            HyperparamEntry(
                "truncation_k", agent.config.k_drop, 0, agent.config.n_quantiles - 1,
                kind="int", rate="abs", max_step=1,
            )
        )
    return HyperparamSet(entries)


def _hparams_sha(hparams: HyperparamSet) -> str:
    payload = json.dumps(hparams.snapshot(), sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


# -- the training loop ---------------------------------------------------------


def run_training(config: ExperimentConfig, seed: int, out_dir=None) -> RunResult:
    started = time.time()
    out = Path(out_dir) if out_dir else Path(config.out_dir) / f"seed{seed}"
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(config.to_json())

    env = build_env(config)
    agent = build_agent(config, env, seed)
    audit = AuditLog(out / "audit.jsonl")
    reward_fn, reward_source = resolve_reward(config, env, out, audit)
    backend = guidance_backend_for(config)
    hparams = build_hparam_set(config, agent)
    rollback = RollbackController()

    is_uav = config.env == "uav"
    is_tqc = isinstance(agent, TqcAgent)
    warmup_target = config.warmup_steps or agent.config.batch_size
    warmup_rng = np.random.Generator(np.random.PCG64(seed + 7777))
    low = env.spec.action_space.low
    high = env.spec.action_space.high
    n_sats = env.scenario.n_satellites if not is_uav else 0

    schedule = ExplorationSchedule(
        config.exploration0, hparams["exploration_decay"].value, config.episodes
    )
    steps_done = 0
    returns: list = []
    metric_values: list = []  # energy (uav) or delivered (sagin)
    recent_losses: list = []
    interventions = 0
    rollbacks = 0
    rollback_notice = ""

    ep_file = open(out / "episodes.jsonl", "w")
    dir_file = open(out / "directives.jsonl", "w") if backend else None
    try:
        for episode in range(config.episodes):
            obs = env.reset(seed=seed * 100_003 + episode)
            epsilon = schedule.epsilon(episode)
            exploration = agent.config.entropy_alpha if is_tqc else epsilon
            ep_return = 0.0
            ep_losses = []
            steps = 0
            done = False
            while not done:
                state = obs.vector
                if steps_done < warmup_target:
                    raw = warmup_rng.uniform(low, high)
                elif is_tqc:
                    raw = agent.select_action(state)
                else:
                    raw = agent.select_action(
                        state, noise_scale=agent.config.noise_scale * epsilon
                    )
                if is_uav:
                    next_obs, reward, done = env.step(raw)
                else:
                    mask = np.array(
                        [obs[f"vis_{i}"] > 0.5 for i in range(n_sats)]
                    )
                    next_obs, reward, done = env.step(decode_action(raw, mask))
                if reward_fn is not None:
                    reward = reward_fn(next_obs.named())
                agent.record(state, raw, reward, next_obs.vector, float(done))
                if steps_done >= warmup_target and steps_done % config.train_every == 0:
                    result = agent.train_step()
                    if result["status"] == "ok":
                        ep_losses.append(result.get("critic_loss", result.get("loss", 0.0)))
                obs = next_obs
                ep_return += reward
                steps += 1
                steps_done += 1

            returns.append(ep_return)
            if ep_losses:
                recent_losses.extend(ep_losses[-5:])
                recent_losses = recent_losses[-100:]
            row = {"episode": episode, "return": round(ep_return, 10), "steps": steps}
            if is_uav:
                row["energy"] = round(env.total_energy, 10)
                metric_values.append(env.total_energy)
            else:
                row["delivered"] = round(env.delivered_total, 10)
                row["handovers"] = env.handovers
                metric_values.append(env.delivered_total)
            row["exploration"] = round(float(exploration), 10)
            row["hparams_sha"] = _hparams_sha(hparams)
            ep_file.write(json.dumps(row, sort_keys=True) + "\n")

            if backend and (episode + 1) % config.guidance_interval == 0:
                window = returns[-config.guidance_interval :]
                rollback.record_window(
                    sum(window) / len(window), hparams.snapshot()
                )
                do_rollback, best_snap, notice = rollback.evaluate()
                if do_rollback:
                    hparams.restore(best_snap)
                    agent.apply_hyperparams(best_snap)
                    rollback_notice = notice
                    rollbacks += 1
                report = GuidanceReport(
                    episode=episode + 1,
                    total_episodes=config.episodes,
                    window_returns=[round(r, 6) for r in window],
                    loss_summary={
                        "critic_loss_mean": round(
                            float(np.mean(recent_losses)) if recent_losses else 0.0, 8
                        )
                    },
                    exploration_stat=round(float(exploration), 8),
                    hyperparams=hparams.snapshot(),
                    rollback_notice=rollback_notice,
                )
                directive = guide(backend, hparams, report, audit)
                directive.rolled_back = do_rollback
                applied_names = {a["name"] for a in directive.applied}
                agent.apply_hyperparams(
                    {n: hparams[n].value for n in applied_names if n in hparams}
                )
                if "exploration_decay" in applied_names:
                    schedule = ExplorationSchedule(
                        config.exploration0,
                        hparams["exploration_decay"].value,
                        config.episodes,
                    )
                if not do_rollback:
                    rollback_notice = ""
                interventions += 1
                drow = directive.to_row()
                drow["hparams"] = hparams.snapshot()
                dir_file.write(json.dumps(drow, sort_keys=True) + "\n")
    finally:
        ep_file.close()
        if dir_file:
            dir_file.close()

    summary = _summarize_run(
        config, seed, returns, metric_values, is_uav,
        interventions, rollbacks, reward_source,
    )
    summary["wall_clock_s"] = round(time.time() - started, 3)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    return RunResult(seed=seed, out_dir=out, summary=summary)


def _summarize_run(config, seed, returns, metric_values, is_uav,
                   interventions, rollbacks, reward_source):
    from .summary import convergence_episode, default_window, final_window_mean

    window = default_window(len(returns))
    metric_name = "energy" if is_uav else "delivered"
    return {
        "label": config.label or f"{config.env}-{config.agent}",
        "env": config.env,
        "agent": config.agent,
        "reward_mode": config.reward_mode,
        "reward_source": reward_source,
        "guidance": config.guidance,
        "seed": seed,
        "episodes": len(returns),
        "final_window": window,
        "final_return_mean": round(final_window_mean(returns, window), 10),
        f"final_{metric_name}_mean": round(final_window_mean(metric_values, window), 10),
        "convergence_episode": convergence_episode(returns, window),
        "interventions": interventions,
        "rollbacks": rollbacks,
    }


def run_experiment(config: ExperimentConfig, out_dir=None) -> list:
    """Run every seed sequentially; each run owns its directory."""
    base = Path(out_dir) if out_dir else Path(config.out_dir)
    return [
        run_training(config, seed, base / f"seed{seed}") for seed in config.seeds
    ]
