"""Scripted baseline agents.

The pursuer baseline sweeps the domain in horizontal lanes spaced two attack
ranges apart (boustrophedon), interrupting the lane to hunt whatever the fog
reveals. Evader baselines: uniform random relocation, and clustered
relocate-and-dwell. All agents act through the same observation/action
surface a remote agent would use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import unit_ai
from .episode import (
    EpisodeConfig,
    EvaderAction,
    Observation,
    PursuerAction,
)


def policy_rng(seed: int, role: str) -> np.random.Generator:
    """Per-role random stream derived from the episode seed.

    Keeps policy randomness out of the world's spawn stream, and gives a
    remote client enough to reproduce a scripted agent exactly: pursuer
    policies draw from spawn_key (1,), evader policies from (2,).
    """
    key = {"pursuer": 1, "evader": 2}[role]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(key,))))


def _centroid(own_layer: np.ndarray) -> tuple[float, float] | None:
    ys, xs = np.nonzero(own_layer)
    if len(xs) == 0:
        return None
    return (float(xs.mean()) + 0.5, float(ys.mean()) + 0.5)


def _enemy_cells(enemy_layer: np.ndarray) -> list[tuple[int, int]]:
    ys, xs = np.nonzero(enemy_layer)
    return [(int(x), int(y)) for x, y in zip(xs, ys)]


@dataclass
class TraversalPlan:
    """Lane geometry of one full sweep.

    Lane centers sit at y = c/2 + k*c with the final lane pulled up so its
    half-height residual stays <= c; emitted waypoints are the cell rows just
    above those centers (cell centers at ideal - 0.5), which keeps the domain
    corners inside attack range of the discretized path.
    """

    lane_centers: list[float]
    lane_rows: list[int]
    lane_spacing: float

    @classmethod
    def for_domain(cls, ly: float, attack_range: float) -> "TraversalPlan":
        c = 2.0 * attack_range
        n = math.ceil(ly / c)
        centers = [c / 2.0 + k * c for k in range(n - 1)]
        cbar = ly - (n - 1) * c
        centers.append(ly - cbar / 2.0)
        rows = [max(0, min(int(ly) - 1, math.ceil(y) - 1)) for y in centers]
        return cls(lane_centers=centers, lane_rows=rows, lane_spacing=c)

    @property
    def n_lanes(self) -> int:
        return len(self.lane_rows)


class TraversalPursuer:
    """Boustrophedon sweep with opportunistic engagements.

    Phases: "sweeping" follows the lane plan with standing attack-move
    orders; a revealed enemy beyond the army's reach switches to "acquiring"
    (camera onto it) then "attacking" (attack_screen on it). An engagement
    An engagement commits to one target cell and holds the attack order
    there until a kill lands, the fog swallows every enemy, or the
    `pursuit_budget` runs out. Only cells that stay enemy-lit across
    consecutive frames are worth committing to: an aimed attack connects
    with targets that hold still, while runners are left to the lane fire.
    A fight the enemy carried into the army's own cell ends differently:
    the army stands its ground through a short confirmation dwell before
    falling back, which is where melee attackers get their hits in.
    Clean ranged kills chain straight into the next engagement; a fight the
    enemy carried into the army's own cell ends with a fall-back cooldown,
    and a kill streak at one spot blacklists that spot for a while and skips
    a lane (anti-camp: a stack of evaders is not worth parking on while the
    rest of the domain goes unswept).
    """

    name = "traversal"

    def __init__(self, config: EpisodeConfig) -> None:
        self.config = config
        stats = config.pursuer_stats
        self.plan = TraversalPlan.for_domain(config.domain.ly, stats.attack_range)
        self.gw = int(config.domain.lx)
        self.gh = int(config.domain.ly)
        # Free parameters (seconds and cells). The pursuit budget matches the
        # design note; the rest trade sweep momentum against kill confirmation.
        self.pursuit_budget = 5.0
        self.cooldown = 4.0
        self.skip_radius = max(stats.attack_range - 1.5, 0.5)
        self.arrive_tol = 1.75
        # Anti-camp: a kill streak at nearly the same cell means the army is
        # farming a stack; break off for a while and skip a lane so one camp
        # cannot absorb the sweep.
        self.camp_kill_cap = 3
        self.camp_spot_eps = 2.0
        self.camp_cooldown = 20.0
        self.camp_skip_lanes = 1
        # A fight carried into the army's own cell ends with a short stand
        # (kill confirmation) and then a fall-back cooldown.
        self.contact_dwell = 1.0
        self.contact_cooldown = 2.0
        self.near_radius = 10.0

        self.phase = "sweeping"
        self.lane_index = 0
        self._lane_dir = 1
        self.sweep_direction = 1  # +x
        self._to_lane = True  # heading to the lane entry (vertical/transit leg)
        self.current_waypoint: tuple[int, int] = (0, self.plan.lane_rows[0])
        self._last_sweep_order: tuple[int, int] | None = None
        self._target_cell: tuple[int, int] | None = None
        self._deadline = 0.0
        self._cooldown_until = 0.0
        self._commit_score = 0
        self._contact_seen = False
        self._dwell_until = 0.0
        self._kill_spot: tuple[int, int] | None = None
        self._kill_streak = 0
        self._lit_hist: list[np.ndarray] = []

    # -- lane plumbing ------------------------------------------------------

    def _advance_waypoint(self) -> None:
        wx, wy = self.current_waypoint
        if self._to_lane:
            # reached the lane entry: sweep across
            self._to_lane = False
            far = self.gw - 1 if self.sweep_direction > 0 else 0
            self.current_waypoint = (far, wy)
        else:
            # lane finished: ping-pong to the neighbor lane, same side
            nxt = self.lane_index + self._lane_dir
            if nxt < 0 or nxt >= self.plan.n_lanes:
                self._lane_dir = -self._lane_dir
                nxt = self.lane_index + self._lane_dir
            self.lane_index = nxt
            self.sweep_direction = -self.sweep_direction
            self._to_lane = True
            self.current_waypoint = (wx, self.plan.lane_rows[nxt])

    def _skip_lane(self, lanes: int = 1) -> None:
        """Abandon the current lane and head for the entry `lanes` ahead."""
        for _ in range(lanes):
            self._to_lane = False
            self._advance_waypoint()

    def _contained(self, cell: tuple[int, int], camera: tuple[int, int]) -> bool:
        cs = self.config.camera_size
        return camera[0] <= cell[0] < camera[0] + cs and camera[1] <= cell[1] < camera[1] + cs

    def _screen(self, cell: tuple[int, int], camera: tuple[int, int]) -> tuple[int, int]:
        return (cell[0] - camera[0], cell[1] - camera[1])

    # -- policy -------------------------------------------------------------

    def step(self, obs: Observation) -> PursuerAction:
        if not obs.selected:
            return PursuerAction.select_army()
        centroid = _centroid(obs.minimap_own)
        if centroid is None:
            return PursuerAction.no_op()
        enemies = _enemy_cells(obs.minimap_enemy)
        if len(self._lit_hist) == 2:
            stable = np.logical_and(obs.minimap_enemy, np.logical_and(*self._lit_hist))
            semi = np.logical_and(obs.minimap_enemy, self._lit_hist[1])
        else:
            stable = np.zeros_like(obs.minimap_enemy)
            semi = stable
        self._lit_hist = [self._lit_hist[-1], obs.minimap_enemy] if self._lit_hist else [obs.minimap_enemy]

        def dist_to(cell: tuple[int, int]) -> float:
            return math.hypot(cell[0] + 0.5 - centroid[0], cell[1] + 0.5 - centroid[1])

        if self.phase != "sweeping":
            act = self._engaged_step(obs, enemies)
            if act is not None:
                return act
            # engagement over; fall through and resume the lane this step
        if enemies and obs.clock >= self._cooldown_until:
            stable_cells = set(_enemy_cells(stable))
            semi_cells = set(_enemy_cells(semi))
            candidates = [
                e
                for e in enemies
                if self.skip_radius < dist_to(e)
                and (e in stable_cells or (e in semi_cells and dist_to(e) <= self.near_radius))
            ]
            if candidates:
                self.phase = "acquiring"
                self._target_cell = min(candidates, key=dist_to)
                self._commit_score = obs.score
                self._contact_seen = False
                self._deadline = obs.clock + self.pursuit_budget
                return self._commit_step(obs)
        return self._sweep_step(obs, centroid)

    def _engaged_step(self, obs: Observation, enemies) -> PursuerAction | None:
        """One decision while committed; None means the engagement ended."""
        if self.phase == "dwelling":
            if obs.clock >= self._dwell_until:
                self._finish_kill(obs)
                return None
            return PursuerAction.no_op()
        if obs.score > self._commit_score:
            if self._contact_seen:
                # stand through a short confirmation before falling back
                self.phase = "dwelling"
                self._dwell_until = obs.clock + self.contact_dwell
                return PursuerAction.no_op()
            self._finish_kill(obs)
            return None
        if not enemies:
            self._end_engagement()
            return None
        if obs.clock >= self._deadline:
            self._end_engagement(cooldown_from=obs.clock)
            return None
        if bool(np.logical_and(obs.minimap_enemy, obs.minimap_own).any()):
            self._contact_seen = True
        return self._commit_step(obs)

    def _finish_kill(self, obs: Observation) -> None:
        """Resume the lane after a successful commit, cooling down if the
        fight was carried into the army's own cell or is farming one spot."""
        gained = max(1, obs.score - self._commit_score)
        spot = self._target_cell
        prev = self._kill_spot
        same = prev is not None and math.hypot(spot[0] - prev[0], spot[1] - prev[1]) < self.camp_spot_eps
        self._kill_streak = self._kill_streak + gained if same else gained
        self._kill_spot = spot
        if self._kill_streak >= self.camp_kill_cap:
            self._kill_streak = 0
            self._end_engagement(cooldown_from=obs.clock, cooldown=self.camp_cooldown)
            # leave the area too: resuming the same lane would walk the ring
            # right back over the stack
            self._skip_lane(self.camp_skip_lanes)
        elif self._contact_seen:
            self._end_engagement(cooldown_from=obs.clock, cooldown=self.contact_cooldown)
        else:
            self._end_engagement()

    def _commit_step(self, obs: Observation) -> PursuerAction:
        cell = self._target_cell
        if not self._contained(cell, obs.camera):
            return PursuerAction.move_camera(cell[0], cell[1])
        if self.phase != "attacking":
            self.phase = "attacking"
            sx, sy = self._screen(cell, obs.camera)
            return PursuerAction.attack_screen(sx, sy)
        return PursuerAction.no_op()

    def _end_engagement(
        self, cooldown_from: float | None = None, cooldown: float | None = None
    ) -> None:
        self.phase = "sweeping"
        self._target_cell = None
        self._last_sweep_order = None  # force a fresh lane order
        if cooldown_from is not None:
            self._cooldown_until = cooldown_from + (self.cooldown if cooldown is None else cooldown)

    def _sweep_step(self, obs: Observation, centroid: tuple[float, float]) -> PursuerAction:
        wx, wy = self.current_waypoint
        if math.hypot(wx + 0.5 - centroid[0], wy + 0.5 - centroid[1]) <= self.arrive_tol:
            self._advance_waypoint()
            self._last_sweep_order = None
            wx, wy = self.current_waypoint
        if not self._contained((wx, wy), obs.camera):
            return PursuerAction.move_camera(wx, wy)
        if self._last_sweep_order != (wx, wy):
            self._last_sweep_order = (wx, wy)
            sx, sy = self._screen((wx, wy), obs.camera)
            return PursuerAction.attack_screen(sx, sy)
        return PursuerAction.no_op()


class RandomEvader:
    """Relocates the whole team to a fresh uniform cell every decision."""

    name = "random"

    def __init__(self, config: EpisodeConfig, rng: np.random.Generator) -> None:
        self.gw = int(config.domain.lx)
        self.gh = int(config.domain.ly)
        self.rng = rng

    def step(self, obs: Observation) -> EvaderAction:
        if not obs.selected:
            return EvaderAction.select_army()
        x = int(self.rng.integers(self.gw))
        y = int(self.rng.integers(self.gh))
        return EvaderAction.move_minimap(x, y)


class ClusterEvader:
    """Relocate-and-dwell: pick a target (a corner half the time), sit there
    for `dwell_length` seconds, repeat. Long dwells keep the team hidden in
    unswept territory instead of parading it across open lanes."""

    name = "cluster"

    def __init__(
        self,
        config: EpisodeConfig,
        rng: np.random.Generator,
        dwell_length: float = 24.0,
    ) -> None:
        self.gw = int(config.domain.lx)
        self.gh = int(config.domain.ly)
        self.rng = rng
        self.dwell_length = dwell_length
        self.dwell_remaining = 0.0
        self.target: tuple[int, int] | None = None
        self._decision_dt = config.tick * config.decision_period

    def step(self, obs: Observation) -> EvaderAction:
        if not obs.selected:
            return EvaderAction.select_army()
        if self.dwell_remaining > 0.0:
            self.dwell_remaining = max(0.0, self.dwell_remaining - self._decision_dt)
            return EvaderAction.no_op()
        if self.rng.random() < 0.5:
            corners = ((0, 0), (self.gw - 1, 0), (0, self.gh - 1), (self.gw - 1, self.gh - 1))
            self.target = corners[int(self.rng.integers(4))]
        else:
            self.target = (int(self.rng.integers(self.gw)), int(self.rng.integers(self.gh)))
        self.dwell_remaining = self.dwell_length
        return EvaderAction.move_minimap(self.target[0], self.target[1])


class NoOpEvader:
    """Emits nothing; units run on built-in behavior or stand still."""

    name = "noop"

    def step(self, obs: Observation) -> EvaderAction:
        return EvaderAction.no_op()


PURSUER_AGENTS = ("traversal",)
EVADER_AGENTS = ("random", "cluster", "builtin", "still")


def make_pursuer(name: str, config: EpisodeConfig, seed: int):
    if name == "traversal":
        return TraversalPursuer(config)
    raise ValueError(f"unknown pursuer agent {name!r}")


def make_evader(name: str, config: EpisodeConfig, seed: int):
    if name == "random":
        return RandomEvader(config, policy_rng(seed, "evader"))
    if name == "cluster":
        return ClusterEvader(config, policy_rng(seed, "evader"))
    if name in ("builtin", "still"):
        return NoOpEvader()
    raise ValueError(f"unknown evader agent {name!r}")


def evader_unit_ai(name: str, config: EpisodeConfig):
    """Per-tick order filler matching an evader agent name, if any.

    "builtin" runs the map's native behavior (zerglings push back, drones
    flee); "still" disables even that, leaving evaders stationary.
    """
    if name == "builtin":
        if config.map_id == "find_and_defeat_zerglings":
            return unit_ai.zergling_orders
        return unit_ai.drone_orders
    return None


__all__ = [
    "ClusterEvader",
    "EVADER_AGENTS",
    "NoOpEvader",
    "PURSUER_AGENTS",
    "RandomEvader",
    "TraversalPlan",
    "TraversalPursuer",
    "evader_unit_ai",
    "make_evader",
    "make_pursuer",
    "policy_rng",
]
