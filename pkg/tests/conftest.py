"""Shared fixtures: fast episode configs and synthetic observations."""

from __future__ import annotations

import numpy as np
import pytest

from fogsweep.episode import EVADER_VERBS, PURSUER_VERBS, EpisodeConfig, Observation


def world_snapshot(world) -> tuple:
    """Byte-level fingerprint of the mutable world state."""
    n = len(world)
    return (
        world.x[:n].tobytes(),
        world.y[:n].tobytes(),
        world.health[:n].tobytes(),
        world.alive[:n].tobytes(),
        world.kills,
    )


@pytest.fixture
def tiny_config():
    """1-second episode (4 decisions) for loop and protocol plumbing tests."""

    def make(**overrides) -> EpisodeConfig:
        kw: dict = {"map_id": "find_and_defeat_zerglings", "time_limit": 1.0, "seed": 11}
        kw.update(overrides)
        return EpisodeConfig(**kw)

    return make


@pytest.fixture
def fake_obs():
    """Factory for hand-built observations to drive agent policies directly."""

    def make(
        selected: bool = True,
        clock: float = 0.0,
        score: int = 0,
        own=((15, 15),),
        enemies=(),
        camera=(8, 8),
        gw: int = 32,
        gh: int = 32,
        cs: int = 16,
        team: str = "pursuer",
    ) -> Observation:
        fog = np.zeros((gh, gw), dtype=np.uint8)
        own_layer = np.zeros((gh, gw), dtype=np.uint8)
        enemy_layer = np.zeros((gh, gw), dtype=np.uint8)
        for x, y in own:
            own_layer[y, x] = 1
            fog[y, x] = 1
        for x, y in enemies:
            enemy_layer[y, x] = 1
        ox, oy = camera
        verbs = PURSUER_VERBS if team == "pursuer" else EVADER_VERBS
        return Observation(
            minimap_fog=fog,
            minimap_own=own_layer,
            minimap_enemy=enemy_layer,
            screen_fog=fog[oy : oy + cs, ox : ox + cs].copy(),
            screen_own=own_layer[oy : oy + cs, ox : ox + cs].copy(),
            screen_enemy=enemy_layer[oy : oy + cs, ox : ox + cs].copy(),
            clock=clock,
            score=score,
            own_alive=len(own),
            enemy_visible=len(enemies),
            camera=camera,
            selected=selected,
            available_actions=verbs,
        )

    return make
