import math

import numpy as np
import pytest

from fogsweep.episode import (
    MAP_IDS,
    Episode,
    EpisodeConfig,
    EvaderAction,
    PursuerAction,
    action_space_size,
    empirical_capture_time,
    render_observation,
)
from fogsweep.unit_ai import zergling_orders
from fogsweep.units import MARINE
from fogsweep.world import EVADER, PURSUER, GameDomain, Vec2, WorldState

from conftest import world_snapshot

NOP = PursuerAction.no_op()
ENOP = EvaderAction.no_op()


def test_map_ids():
    assert MAP_IDS == ("find_and_defeat_zerglings", "find_and_defeat_drones")


def test_default_config_types():
    z = EpisodeConfig(map_id="find_and_defeat_zerglings")
    assert (z.pursuer_type, z.evader_type) == ("marine", "zergling")
    d = EpisodeConfig(map_id="find_and_defeat_drones")
    assert (d.pursuer_type, d.evader_type) == ("void_ray", "drone")


def test_action_space_sizes():
    assert action_space_size(EpisodeConfig()) == 1028
    small = EpisodeConfig(domain=GameDomain(16, 16), camera_size=16)
    assert action_space_size(small) == 260
    dot = EpisodeConfig(domain=GameDomain(1, 1), camera_size=1, n_evaders=1, n_pursuers=1)
    assert action_space_size(dot) == 5


def test_empirical_capture_time():
    assert empirical_capture_time(45, 180.0) == 4.0
    assert empirical_capture_time(0, 180.0) == math.inf
    assert empirical_capture_time(70, 180.0) == pytest.approx(2.571, abs=0.001)
    with pytest.raises(ValueError):
        empirical_capture_time(-1, 180.0)


@pytest.mark.parametrize(
    "kw",
    [
        {"map_id": "find_and_defeat_ultralisks"},
        {"domain": GameDomain(31.5, 32)},
        {"n_pursuers": 0},
        {"n_evaders": 0},
        {"time_limit": 0.0},
        {"time_limit": 1.03},
        {"decision_period": 0},
        {"camera_size": 33},
        {"camera_size": 0},
        {"evader_type": "battlecruiser"},
    ],
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        EpisodeConfig(**kw)


def test_config_round_trip():
    cfg = EpisodeConfig(map_id="find_and_defeat_drones", n_evaders=7, seed=99, time_limit=20.0)
    again = EpisodeConfig.from_dict(cfg.to_dict())
    assert again == cfg
    d = cfg.to_dict()
    assert d["domain"] == {"lx": 32.0, "ly": 32.0}
    d["mystery"] = 1
    with pytest.raises(ValueError):
        EpisodeConfig.from_dict(d)


def test_decision_counts():
    cfg = EpisodeConfig()
    assert cfg.total_ticks == 1440
    assert cfg.total_decisions == 720


def test_action_validation():
    with pytest.raises(ValueError):
        PursuerAction("move_camera")
    with pytest.raises(ValueError):
        PursuerAction("move_camera", 1.5, 2)
    with pytest.raises(ValueError):
        PursuerAction("no_op", 1, 2)
    with pytest.raises(ValueError):
        PursuerAction("move_minimap", 1, 2)
    with pytest.raises(ValueError):
        EvaderAction("attack_screen", 1, 2)


def test_reset_layout_and_determinism():
    cfg = EpisodeConfig(seed=42)
    a = Episode(cfg)
    b = Episode(cfg)
    a.reset()
    b.reset()
    assert world_snapshot(a.world) == world_snapshot(b.world)
    assert a.world.alive_count(PURSUER) == 3
    assert a.world.alive_count(EVADER) == 25
    assert a.spawned_evaders == 25
    for uid in a.world.alive_ids(PURSUER):
        assert a.world.unit(uid).pos == Vec2(16.0, 16.0)
    assert a.camera[PURSUER] == (8, 8)
    assert a.selected == {PURSUER: False, EVADER: False}


def test_different_seeds_differ():
    a = Episode(EpisodeConfig(seed=1))
    b = Episode(EpisodeConfig(seed=2))
    a.reset()
    b.reset()
    assert world_snapshot(a.world) != world_snapshot(b.world)


def test_single_evader_allowed():
    eng = Episode(EpisodeConfig(n_evaders=1))
    eng.reset()
    assert eng.world.alive_count(EVADER) == 1


def test_full_noop_episode_is_720_steps():
    eng = Episode(EpisodeConfig(seed=3))
    eng.reset()
    steps = 0
    done = False
    while not done:
        res = eng.step(NOP, ENOP)
        done = res.done
        steps += 1
    assert steps == 720
    assert eng.world.clock == 180.0
    assert eng.score == 0
    with pytest.raises(RuntimeError):
        eng.step(NOP, ENOP)


@pytest.mark.parametrize("click,origin", [((0, 0), (0, 0)), ((16, 16), (8, 8)), ((31, 31), (16, 16))])
def test_move_camera_centers_and_clamps(click, origin):
    eng = Episode(EpisodeConfig(time_limit=30.0))
    eng.reset()
    res = eng.step(PursuerAction.move_camera(*click), ENOP)
    assert eng.camera[PURSUER] == origin
    assert res.obs_pursuer.camera == origin
    assert "pursuer_action_ignored" not in res.flags


def test_move_camera_off_map_is_ignored():
    eng = Episode(EpisodeConfig(time_limit=30.0))
    eng.reset()
    res = eng.step(PursuerAction.move_camera(32, 0), ENOP)
    assert "pursuer_action_ignored" in res.flags
    assert eng.camera[PURSUER] == (8, 8)


def test_attack_screen_requires_selection():
    eng = Episode(EpisodeConfig(time_limit=30.0))
    eng.reset()
    res = eng.step(PursuerAction.attack_screen(0, 0), ENOP)
    assert "pursuer_action_ignored" in res.flags
    n = len(eng.world)
    assert (eng.world.order_kind[:n] == 0).all()

    eng.step(PursuerAction.select_army(), ENOP)
    res = eng.step(PursuerAction.attack_screen(0, 0), ENOP)
    assert res.flags == ()
    for uid in eng.world.alive_ids(PURSUER):
        order = eng.world.unit(uid).order
        assert order.kind == "attack_move"
        assert order.target == Vec2(8.5, 8.5)


def test_attack_screen_outside_screen_is_ignored():
    eng = Episode(EpisodeConfig(time_limit=30.0))
    eng.reset()
    eng.step(PursuerAction.select_army(), ENOP)
    res = eng.step(PursuerAction.attack_screen(16, 0), ENOP)
    assert "pursuer_action_ignored" in res.flags


def test_move_minimap_requires_selection():
    eng = Episode(EpisodeConfig(time_limit=30.0))
    eng.reset()
    res = eng.step(NOP, EvaderAction.move_minimap(4, 4))
    assert "evader_action_ignored" in res.flags

    eng.step(NOP, EvaderAction.select_army())
    res = eng.step(NOP, EvaderAction.move_minimap(4, 4))
    assert res.flags == ()
    for uid in eng.world.alive_ids(EVADER):
        order = eng.world.unit(uid).order
        assert order.kind == "move"
        assert order.target == Vec2(4.5, 4.5)

    res = eng.step(NOP, EvaderAction.move_minimap(32, 0))
    assert "evader_action_ignored" in res.flags


def test_available_actions_gate_on_selection():
    eng = Episode(EpisodeConfig(time_limit=30.0))
    obs_p, obs_e = eng.reset()
    assert "attack_screen" not in obs_p.available_actions
    assert "move_minimap" not in obs_e.available_actions
    res = eng.step(PursuerAction.select_army(), EvaderAction.select_army())
    assert "attack_screen" in res.obs_pursuer.available_actions
    assert "move_minimap" in res.obs_evader.available_actions


def test_render_layers_and_screen_window():
    w = WorldState(GameDomain(32, 32))
    w.add_unit(PURSUER, MARINE, Vec2(9.5, 9.5))
    obs = render_observation(w, PURSUER, camera=(8, 8), selected=False, camera_size=16)
    assert obs.minimap_own[9, 9] == 1
    assert obs.minimap_own.sum() == 1
    assert obs.screen_own[1, 1] == 1
    assert obs.screen_own.shape == (16, 16)
    # fog: lit cells are those whose center is within sight of an own unit
    assert obs.minimap_fog[9, 9] == 1
    assert obs.minimap_fog[9, 18] == 1  # center (18.5, 9.5), 9.0 away
    assert obs.minimap_fog[9, 19] == 0  # center (19.5, 9.5), 10.0 away
    assert obs.own_alive == 1
    assert obs.enemy_visible == 0


def test_colocated_units_share_a_cell():
    w = WorldState(GameDomain(32, 32))
    w.add_unit(PURSUER, MARINE, Vec2(5.2, 5.2))
    w.add_unit(PURSUER, MARINE, Vec2(5.8, 5.8))
    obs = render_observation(w, PURSUER, camera=(0, 0), selected=False, camera_size=16)
    assert obs.minimap_own.sum() == 1
    assert obs.own_alive == 2


def test_far_enemy_not_in_layers():
    eng = Episode(EpisodeConfig(n_evaders=1, time_limit=30.0))
    eng.reset()
    z = eng.world.alive_ids(EVADER)[0]
    eng.world.x[z] = 28.0
    eng.world.y[z] = 16.0  # 12 cells from the marines at (16, 16)
    res = eng.step(NOP, ENOP)
    assert res.obs_pursuer.enemy_visible == 0
    assert res.obs_pursuer.minimap_enemy.sum() == 0
    # the evader side always sees itself
    assert res.obs_evader.minimap_own.sum() == 1


def test_respawn_wave_when_cleared():
    cfg = EpisodeConfig(
        map_id="find_and_defeat_drones", n_pursuers=1, n_evaders=2, time_limit=60.0, seed=5
    )
    eng = Episode(cfg)
    eng.reset()
    za, zb = eng.world.alive_ids(EVADER)
    eng.world.x[za], eng.world.y[za] = 18.0, 16.0
    eng.world.x[zb], eng.world.y[zb] = 19.0, 16.0
    eng.step(PursuerAction.select_army(), ENOP)
    eng.step(PursuerAction.attack_screen(10, 8), ENOP)

    rewards = []
    saw_one_alive = False
    while eng.score < 2 and not eng.done:
        res = eng.step(NOP, ENOP)
        rewards.append(res.reward_pursuer)
        if eng.score == 1 and eng.world.alive_count(EVADER) == 1:
            saw_one_alive = True
            assert eng.spawned_evaders == 2  # no respawn while one is left

    assert saw_one_alive
    assert eng.score == 2
    assert eng.spawned_evaders == 4  # wave respawned the moment the field emptied
    assert eng.world.alive_count(EVADER) == 2
    assert sum(rewards) == 2


def test_pursuer_wipe_ends_episode():
    cfg = EpisodeConfig(n_pursuers=1, n_evaders=5, time_limit=30.0, seed=8)
    eng = Episode(cfg, evader_unit_ai=zergling_orders)
    eng.reset()
    for uid in eng.world.alive_ids(EVADER):
        eng.world.x[uid] = 16.0 + 0.1 * (uid % 3)
        eng.world.y[uid] = 16.0 + 0.1 * (uid % 2)
    steps = 0
    res = None
    while not eng.done:
        res = eng.step(NOP, ENOP)
        steps += 1
        assert steps < 240
    assert eng.world.alive_count(PURSUER) == 0
    assert eng.world.clock < 30.0
    assert res.obs_pursuer.own_alive == 0


def test_rewards_are_zero_sum_and_sum_to_score():
    cfg = EpisodeConfig(time_limit=30.0, seed=13)
    eng = Episode(cfg, evader_unit_ai=zergling_orders)
    eng.reset()
    eng.step(PursuerAction.select_army(), ENOP)
    total = 0
    last_score = 0
    done = False
    while not done:
        res = eng.step(PursuerAction.attack_screen(8, 8), ENOP)
        assert res.reward_evader == -res.reward_pursuer
        assert res.episode_score >= last_score
        total += res.reward_pursuer
        last_score = res.episode_score
        done = res.done
    assert total == eng.score


def test_replay_determinism():
    cfg = EpisodeConfig(time_limit=30.0, seed=21)
    actions = [PursuerAction.select_army()]
    actions += [
        PursuerAction.attack_screen((3 * i) % 16, (5 * i) % 16) if i % 4 else PursuerAction.no_op()
        for i in range(119)
    ]
    snaps = []
    for _ in range(2):
        eng = Episode(cfg, evader_unit_ai=zergling_orders)
        eng.reset()
        for act in actions:
            eng.step(act, ENOP)
        snaps.append((world_snapshot(eng.world), eng.score, eng.steps_taken))
    assert snaps[0] == snaps[1]
