"""UAV world: energy ledger arithmetic, battery conservation, reward identities."""

import numpy as np
import pytest

from uplinkrl.dsl import compile_reward, parse
from uplinkrl.envs import UavScenario, UavWorld, enriched_reward_source, manual_reward_source
from uplinkrl.errors import ConfigError, ContractError
from uplinkrl.mdp import run_episode


def make_world(**kw):
    return UavWorld(UavScenario(**kw))


def test_layout_fixed_by_scenario_seed():
    a = make_world(scenario_seed=7)
    b = make_world(scenario_seed=7)
    c = make_world(scenario_seed=8)
    assert np.array_equal(a.terminals, b.terminals)
    assert not np.array_equal(a.terminals, c.terminals)
    assert a.terminals.shape == (10, 2)


def test_reset_seed_controls_start_only():
    w = make_world()
    o1 = w.reset(seed=3)
    o2 = w.reset(seed=3)
    o3 = w.reset(seed=4)
    assert np.array_equal(o1.vector, o2.vector)
    assert not np.array_equal(o1.vector, o3.vector)
    # start stays inside the central start box
    for o in (o1, o3):
        assert 0.25 <= o["ux"] <= 0.75
        assert 0.25 <= o["uy"] <= 0.75
    assert o1["battery_frac"] == 1.0
    assert o1["energy"] == 0.0
    assert o1["penalty"] == 1.0


def test_move_step_ledger_by_hand():
    # speed 5 from a 3-4-5 triangle: E = 0.5 * 25 = 12.5 J, no hover, no tx
    w = make_world()
    w.reset(seed=0)
    obs, reward, done = w.step((3.0, 4.0))
    assert w.ledger == {"move": 12.5, "hover": 0.0, "tx": 0.0}
    assert obs["energy"] == pytest.approx(0.125)
    assert reward == pytest.approx(-0.125)
    assert not done


def test_hover_step_away_from_terminals():
    w = make_world()
    w.reset(seed=0)
    # park the craft far from every terminal, then loiter
    w._pos = np.array([0.0, 0.0])
    dists = np.linalg.norm(w.terminals - w._pos, axis=1)
    assert dists.min() > w.scenario.collect_radius
    obs, reward, done = w.step((0.0, 0.0))
    assert w.ledger == {"move": 0.0, "hover": 1.0, "tx": 0.0}
    assert reward == pytest.approx(-0.01)


def test_hover_over_terminal_collects_and_charges_tx():
    w = make_world()
    w.reset(seed=0)
    w._pos = w.terminals[0].copy()
    obs, reward, done = w.step((0.0, 0.0))
    assert w.ledger["tx"] >= 0.1  # at least the terminal we parked on
    assert w.ledger["hover"] == 1.0
    assert obs["fresh_0"] == 0.0
    # an uncollected terminal has aged one slot
    far = int(np.argmax(np.linalg.norm(w.terminals - w._pos, axis=1)))
    assert obs[f"fresh_{far}"] == pytest.approx(1.0 / 200.0)


def test_slow_creep_counts_as_hover():
    w = make_world()
    w.reset(seed=0)
    w._pos = np.array([0.0, 0.0])
    obs, _, _ = w.step((1.0, 0.0))  # speed 1 < hover_speed 2
    assert w.ledger["move"] == pytest.approx(0.5)
    assert w.ledger["hover"] == 1.0


def test_speed_cap_rescales_corner_actions():
    w = make_world()
    w.reset(seed=0)
    w.step((50.0, 50.0))  # corner norm ~70.7 gets capped to 50
    assert w.ledger["move"] == pytest.approx(0.5 * 50.0**2)


def test_action_outside_box_rejected():
    w = make_world()
    w.reset(seed=0)
    with pytest.raises(ContractError):
        w.step((51.0, 0.0))
    with pytest.raises(ContractError):
        w.step((0.0, 0.0, 0.0))


def test_boundary_violation_doubles_penalty():
    w = make_world(start_frac=1e-09)
    w.reset(seed=0)
    w._pos = np.array([990.0, 500.0])
    obs, reward, _ = w.step((50.0, 0.0))
    assert obs["penalty"] == 2.0
    assert obs["ux"] == 1.0  # clipped to the wall
    assert reward == pytest.approx(-(1250.0 / 100.0) * 2.0)


def test_battery_conservation_over_random_walk():
    w = make_world()
    w.reset(seed=11)
    rng = np.random.default_rng(11)
    spent_before = w.scenario.initial_battery - w._battery
    assert spent_before == 0.0
    for _ in range(50):
        w.step(rng.uniform(-20.0, 20.0, size=2))
    spent = w.scenario.initial_battery - w._battery
    assert spent == pytest.approx(w.total_energy, abs=1e-9)


def test_battery_exhaustion_scales_final_step_and_ends_episode():
    w = make_world(initial_battery=20.0)
    w.reset(seed=0)
    w.step((5.0, 0.0))  # 12.5 J
    obs, _, done = w.step((5.0, 0.0))  # wants 12.5, only 7.5 left
    assert done
    assert w._battery == 0.0
    assert w.total_energy == pytest.approx(20.0, abs=1e-9)
    assert obs["battery_frac"] == 0.0
    assert obs["penalty"] == 2.0  # below the critical fraction
    with pytest.raises(ContractError):
        w.step((0.0, 0.0))


def test_position_score_peaks_at_centroid():
    w = make_world()
    w.reset(seed=0)
    assert w.position_score(w.centroid) == 1.0
    far = w.position_score((0.0, 0.0))
    near = w.position_score(w.centroid + np.array([10.0, 0.0]))
    assert far < near < 1.0
    d = np.linalg.norm(w.centroid) / (1000.0 * np.sqrt(2.0))
    assert far == pytest.approx(1.0 / (1.0 + d))


def test_manual_reward_matches_energy_times_penalty():
    w = make_world()
    w.reset(seed=5)
    rng = np.random.default_rng(5)
    for _ in range(20):
        obs, reward, done = w.step(rng.uniform(-50.0, 50.0, size=2))
        assert reward == pytest.approx(-obs["energy"] * obs["penalty"])


def test_reward_sources_parse_against_env_schema():
    w = make_world()
    manual = compile_reward(parse(manual_reward_source(w.scenario), schema=w.spec.feature_names))
    enriched = compile_reward(parse(enriched_reward_source(w.scenario), schema=w.spec.feature_names))
    # worked example: energy 2, position_score 1, penalty 1
    bindings = {name: 0.0 for name in w.spec.feature_names}
    bindings.update(energy=2.0, position_score=1.0, penalty=1.0)
    assert manual(bindings) == pytest.approx(-2.0)
    assert enriched(bindings) == pytest.approx(-1.5)


def test_enriched_reward_agrees_with_manual_when_position_weight_zero():
    s = UavScenario(w2=0.0)
    w = UavWorld(s)
    enriched = compile_reward(parse(enriched_reward_source(s), schema=w.spec.feature_names))
    w.reset(seed=2)
    rng = np.random.default_rng(2)
    for _ in range(10):
        obs, reward, _ = w.step(rng.uniform(-30.0, 30.0, size=2))
        assert enriched(obs.named()) == pytest.approx(reward)


def test_feature_ranges_cover_observed_values():
    w = make_world()
    ranges = w.feature_ranges()
    assert set(ranges) == set(w.spec.feature_names)
    obs = w.reset(seed=9)
    rng = np.random.default_rng(9)
    for _ in range(100):
        for name, (lo, hi) in ranges.items():
            assert lo - 1e-9 <= obs[name] <= hi + 1e-9, name
        obs, _, done = w.step(rng.uniform(-50.0, 50.0, size=2))
        if done:
            break


def test_full_episode_reaches_horizon():
    w = make_world()
    episode = run_episode(w, lambda obs: (0.0, 0.0), seed=1)
    assert len(episode.transitions) == 200
    assert episode.transitions[-1].done
    # 200 hover slots, occasionally with collection on top
    assert w.total_energy >= 200.0


def test_scenario_validation():
    with pytest.raises(ConfigError):
        UavScenario(n_terminals=0)
    with pytest.raises(ConfigError):
        UavScenario(start_frac=0.0)
    with pytest.raises(ConfigError):
        UavScenario(energy_scale=-1.0)
