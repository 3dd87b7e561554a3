"""Deterministic fog-of-war pursuit simulator.

A small real-time engine in the style of StarCraft II mini-games: a team of
pursuers sweeps a square domain for evaders hidden by fog of war, agents act
through a screen/minimap action set, and a search-theory module predicts
capture times for the lane-sweep strategy. A lockstep NDJSON-over-TCP protocol
exposes both agent slots to external processes.
"""

from __future__ import annotations

from .episode import Episode, EpisodeConfig, Observation, StepResult, action_space_size
from .units import UNIT_TYPES, UnitStats
from .world import GameDomain, Order, Unit, Vec2, WorldState

__all__ = [
    "Episode",
    "EpisodeConfig",
    "GameDomain",
    "Observation",
    "Order",
    "StepResult",
    "UNIT_TYPES",
    "Unit",
    "UnitStats",
    "Vec2",
    "WorldState",
    "action_space_size",
]

__version__ = "0.1.0"
