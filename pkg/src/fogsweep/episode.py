"""The two mini-games: action model, fog-filtered observations, episode loop.

A decision step applies one action per side (the human-habit verb set:
select/camera/attack verbs, not per-unit micro), then advances the world by
`decision_period` ticks. Fog of war filters each side's observation to what
its own units' sight radii reveal. Kills are cumulative; when the whole
evader team is dead it respawns at fresh uniform positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Any, Callable, Literal

import numpy as np

from . import kernel
from .units import UNIT_TYPES, UnitStats
from .world import (
    EVADER,
    PURSUER,
    GameDomain,
    Order,
    Vec2,
    WorldState,
    team_visibility,
)

MAP_IDS = ("find_and_defeat_zerglings", "find_and_defeat_drones")

_MAP_DEFAULT_TYPES = {
    "find_and_defeat_zerglings": ("marine", "zergling"),
    "find_and_defeat_drones": ("void_ray", "drone"),
}

PURSUER_VERBS = ("no_op", "select_army", "move_camera", "attack_screen")
EVADER_VERBS = ("no_op", "select_army", "move_minimap")


@dataclass(frozen=True)
class EpisodeConfig:
    """Static parameters of one mini-game episode.

    `domain` sides must be whole numbers of cells: the observation grids and
    the minimap action coordinates are cell-indexed.
    """

    map_id: str = "find_and_defeat_zerglings"
    domain: GameDomain = field(default_factory=lambda: GameDomain(32.0, 32.0))
    n_pursuers: int = 3
    n_evaders: int = 25
    pursuer_type: str | None = None
    evader_type: str | None = None
    time_limit: float = 180.0
    tick: float = 0.125
    decision_period: int = 2
    camera_size: int = 16
    seed: int = 0

    def __post_init__(self) -> None:
        if self.map_id not in MAP_IDS:
            raise ValueError(f"unknown map_id {self.map_id!r}")
        if self.domain.lx != int(self.domain.lx) or self.domain.ly != int(self.domain.ly):
            raise ValueError("domain sides must be whole cells")
        if self.n_pursuers < 1 or self.n_evaders < 1:
            raise ValueError("need at least one unit per side")
        if self.time_limit <= 0 or self.tick <= 0:
            raise ValueError("time_limit and tick must be positive")
        if self.decision_period < 1:
            raise ValueError("decision_period must be >= 1")
        if not (1 <= self.camera_size <= min(self.domain.lx, self.domain.ly)):
            raise ValueError("camera_size must fit inside the domain")
        ticks = self.time_limit / self.tick
        if abs(ticks - round(ticks)) > 1e-9:
            raise ValueError("time_limit must be a whole number of ticks")
        defaults = _MAP_DEFAULT_TYPES[self.map_id]
        if self.pursuer_type is None:
            object.__setattr__(self, "pursuer_type", defaults[0])
        if self.evader_type is None:
            object.__setattr__(self, "evader_type", defaults[1])
        for name in (self.pursuer_type, self.evader_type):
            if name not in UNIT_TYPES:
                raise ValueError(f"unknown unit type {name!r}")

    @property
    def pursuer_stats(self) -> UnitStats:
        return UNIT_TYPES[self.pursuer_type]

    @property
    def evader_stats(self) -> UnitStats:
        return UNIT_TYPES[self.evader_type]

    @property
    def grid_shape(self) -> tuple[int, int]:
        """(rows, cols) = (ly, lx) of the minimap grids."""
        return (int(self.domain.ly), int(self.domain.lx))

    @property
    def total_ticks(self) -> int:
        return round(self.time_limit / self.tick)

    @property
    def total_decisions(self) -> int:
        return math.ceil(self.total_ticks / self.decision_period)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {}
        for f in fields(self):
            v = getattr(self, f.name)
            d[f.name] = {"lx": v.lx, "ly": v.ly} if isinstance(v, GameDomain) else v
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "EpisodeConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        kw = dict(d)
        if "domain" in kw and isinstance(kw["domain"], dict):
            kw["domain"] = GameDomain(float(kw["domain"]["lx"]), float(kw["domain"]["ly"]))
        return cls(**kw)


def action_space_size(config: EpisodeConfig) -> int:
    """Flat action-space cardinality of the learning formulation: one id per
    minimap cell plus the four verbs."""
    return int(config.domain.lx) * int(config.domain.ly) + 4


def empirical_capture_time(score: int, t_f: float) -> float:
    """Mean observed capture time t_f / score; +inf when nothing was caught."""
    if score < 0 or t_f < 0:
        raise ValueError("score and t_f must be non-negative")
    if score == 0:
        return math.inf
    return t_f / score


@dataclass(frozen=True)
class PursuerAction:
    name: Literal["no_op", "select_army", "move_camera", "attack_screen"]
    x: int | None = None
    y: int | None = None

    def __post_init__(self) -> None:
        _check_verb(self.name, PURSUER_VERBS, self.x, self.y)

    @classmethod
    def no_op(cls) -> "PursuerAction":
        return cls("no_op")

    @classmethod
    def select_army(cls) -> "PursuerAction":
        return cls("select_army")

    @classmethod
    def move_camera(cls, x: int, y: int) -> "PursuerAction":
        return cls("move_camera", x, y)

    @classmethod
    def attack_screen(cls, x: int, y: int) -> "PursuerAction":
        return cls("attack_screen", x, y)


@dataclass(frozen=True)
class EvaderAction:
    name: Literal["no_op", "select_army", "move_minimap"]
    x: int | None = None
    y: int | None = None

    def __post_init__(self) -> None:
        _check_verb(self.name, EVADER_VERBS, self.x, self.y)

    @classmethod
    def no_op(cls) -> "EvaderAction":
        return cls("no_op")

    @classmethod
    def select_army(cls) -> "EvaderAction":
        return cls("select_army")

    @classmethod
    def move_minimap(cls, x: int, y: int) -> "EvaderAction":
        return cls("move_minimap", x, y)


def _check_verb(name: str, verbs: tuple[str, ...], x: int | None, y: int | None) -> None:
    if name not in verbs:
        raise ValueError(f"unknown action {name!r}")
    takes_coords = name in ("move_camera", "move_minimap", "attack_screen")
    if takes_coords:
        if x is None or y is None:
            raise ValueError(f"{name} needs integer coordinates")
        if not isinstance(x, int) or not isinstance(y, int):
            raise ValueError(f"{name} coordinates must be integers")
    elif x is not None or y is not None:
        raise ValueError(f"{name} takes no coordinates")


@dataclass(frozen=True, eq=False)
class Observation:
    """One side's fog-filtered view.

    Grids are uint8 indexed [y, x] (row 0 is the top edge); `camera` is the
    (x, y) origin of the screen window, which covers cells
    [camera_x, camera_x + camera_size) x [camera_y, ...). Scalars: `clock` in
    seconds, `score` the cumulative kill count, `own_alive` own living units,
    `enemy_visible` enemy units currently revealed (units, not cells).
    """

    minimap_fog: np.ndarray
    minimap_own: np.ndarray
    minimap_enemy: np.ndarray
    screen_fog: np.ndarray
    screen_own: np.ndarray
    screen_enemy: np.ndarray
    clock: float
    score: int
    own_alive: int
    enemy_visible: int
    camera: tuple[int, int]
    selected: bool
    available_actions: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class StepResult:
    obs_pursuer: Observation
    obs_evader: Observation
    reward_pursuer: int
    reward_evader: int
    done: bool
    episode_score: int
    flags: tuple[str, ...] = ()


def _cell(v: float, n: int) -> int:
    i = int(v)
    return n - 1 if i >= n else i


def render_observation(
    world: WorldState,
    team: int,
    camera: tuple[int, int],
    selected: bool,
    camera_size: int,
) -> Observation:
    """Project the world into one side's minimap/screen feature layers."""
    gh = int(world.domain.ly)
    gw = int(world.domain.lx)
    n = len(world)
    own_mask = (world.team[:n] == team) & (world.alive[:n] == 1)
    own_ids = np.nonzero(own_mask)[0]

    lit = np.zeros((gh, gw), dtype=bool)
    cx = np.arange(gw) + 0.5
    cy = np.arange(gh) + 0.5
    for i in own_ids:
        dx2 = (cx - world.x[i]) ** 2
        dy2 = (cy - world.y[i]) ** 2
        lit |= (dy2[:, None] + dx2[None, :]) <= world.sight[i] ** 2

    own = np.zeros((gh, gw), dtype=np.uint8)
    for i in own_ids:
        own[_cell(world.y[i], gh), _cell(world.x[i], gw)] = 1

    enemy = np.zeros((gh, gw), dtype=np.uint8)
    vis_ids = np.nonzero(team_visibility(world, team))[0]
    for i in vis_ids:
        enemy[_cell(world.y[i], gh), _cell(world.x[i], gw)] = 1

    ox, oy = camera
    cs = camera_size
    fog = lit.astype(np.uint8)
    verbs = PURSUER_VERBS if team == PURSUER else EVADER_VERBS
    gated = ("attack_screen", "move_minimap")
    available = tuple(v for v in verbs if selected or v not in gated)
    return Observation(
        minimap_fog=fog,
        minimap_own=own,
        minimap_enemy=enemy,
        screen_fog=fog[oy : oy + cs, ox : ox + cs].copy(),
        screen_own=own[oy : oy + cs, ox : ox + cs].copy(),
        screen_enemy=enemy[oy : oy + cs, ox : ox + cs].copy(),
        clock=world.clock,
        score=world.kills,
        own_alive=len(own_ids),
        enemy_visible=len(vis_ids),
        camera=(ox, oy),
        selected=selected,
        available_actions=available,
    )


UnitPolicy = Callable[[WorldState], None]


class Episode:
    """One running mini-game with per-side camera and selection state.

    `pursuer_unit_ai` / `evader_unit_ai` are per-tick order fillers for a
    side that no action agent drives (the built-in unit behaviors of the
    mini-games). A side under agent control leaves them None: its units keep
    executing standing orders.
    """

    def __init__(
        self,
        config: EpisodeConfig,
        pursuer_unit_ai: UnitPolicy | None = None,
        evader_unit_ai: UnitPolicy | None = None,
    ) -> None:
        self.config = config
        self.pursuer_unit_ai = pursuer_unit_ai
        self.evader_unit_ai = evader_unit_ai
        self.world: WorldState = WorldState(config.domain, config.seed)
        self.done = True  # becomes False on reset
        self.spawned_evaders = 0
        self._steps = 0
        cs = config.camera_size
        gx = (int(config.domain.lx) - cs) // 2
        gy = (int(config.domain.ly) - cs) // 2
        self._camera_home = (gx, gy)
        self.camera = {PURSUER: self._camera_home, EVADER: self._camera_home}
        self.selected = {PURSUER: False, EVADER: False}

    # -- lifecycle ---------------------------------------------------------

    def reset(self) -> tuple[Observation, Observation]:
        """Fresh world from the config seed: evaders uniform, pursuers at the
        domain center, camera centered, nothing selected."""
        cfg = self.config
        self.world = WorldState(cfg.domain, cfg.seed)
        self.done = False
        self._steps = 0
        self.spawned_evaders = 0
        self.camera = {PURSUER: self._camera_home, EVADER: self._camera_home}
        self.selected = {PURSUER: False, EVADER: False}
        center = Vec2(cfg.domain.lx / 2.0, cfg.domain.ly / 2.0)
        for _ in range(cfg.n_pursuers):
            self.world.add_unit(PURSUER, cfg.pursuer_stats, center)
        self._spawn_evaders()
        return self._observe(PURSUER), self._observe(EVADER)

    def _spawn_evaders(self) -> None:
        cfg = self.config
        u = self.world.rng.uniform(size=(cfg.n_evaders, 2))
        for k in range(cfg.n_evaders):
            pos = Vec2(float(u[k, 0] * cfg.domain.lx), float(u[k, 1] * cfg.domain.ly))
            self.world.add_unit(EVADER, cfg.evader_stats, pos)
        self.spawned_evaders += cfg.n_evaders

    # -- actions -----------------------------------------------------------

    def _apply_pursuer(self, act: PursuerAction) -> bool:
        """Returns False when the action had to be ignored."""
        cfg = self.config
        if act.name == "no_op":
            return True
        if act.name == "select_army":
            self.selected[PURSUER] = True
            return True
        if act.name == "move_camera":
            if not self._on_minimap(act.x, act.y):
                return False
            self.camera[PURSUER] = self._center_camera(act.x, act.y)
            return True
        # attack_screen
        if not self.selected[PURSUER]:
            return False
        cs = cfg.camera_size
        if not (0 <= act.x < cs and 0 <= act.y < cs):
            return False
        ox, oy = self.camera[PURSUER]
        target = Vec2(ox + act.x + 0.5, oy + act.y + 0.5)
        order = Order("attack_move", target)
        for uid in self.world.alive_ids(PURSUER):
            self.world.set_order(uid, order)
        return True

    def _apply_evader(self, act: EvaderAction) -> bool:
        if act.name == "no_op":
            return True
        if act.name == "select_army":
            self.selected[EVADER] = True
            return True
        # move_minimap
        if not self.selected[EVADER]:
            return False
        if not self._on_minimap(act.x, act.y):
            return False
        order = Order("move", Vec2(act.x + 0.5, act.y + 0.5))
        for uid in self.world.alive_ids(EVADER):
            self.world.set_order(uid, order)
        return True

    def _on_minimap(self, x: int, y: int) -> bool:
        return 0 <= x < int(self.config.domain.lx) and 0 <= y < int(self.config.domain.ly)

    def _center_camera(self, x: int, y: int) -> tuple[int, int]:
        cs = self.config.camera_size
        gw = int(self.config.domain.lx)
        gh = int(self.config.domain.ly)
        ox = min(max(x - cs // 2, 0), gw - cs)
        oy = min(max(y - cs // 2, 0), gh - cs)
        return (ox, oy)

    # -- stepping ----------------------------------------------------------

    def step(self, act_p: PursuerAction, act_e: EvaderAction) -> StepResult:
        """Apply both actions, run `decision_period` ticks, settle respawn
        and termination."""
        if self.done:
            raise RuntimeError("episode is done; call reset()")
        cfg = self.config
        flags: list[str] = []
        if not self._apply_pursuer(act_p):
            flags.append("pursuer_action_ignored")
        if not self._apply_evader(act_e):
            flags.append("evader_action_ignored")

        kills_before = self.world.kills
        for _ in range(cfg.decision_period):
            if self.pursuer_unit_ai is not None:
                self.pursuer_unit_ai(self.world)
            if self.evader_unit_ai is not None:
                self.evader_unit_ai(self.world)
            kernel.world_tick(self.world, cfg.tick)
            if self.world.alive_count(EVADER) == 0:
                self._spawn_evaders()
            if self.world.alive_count(PURSUER) == 0:
                break

        self._steps += 1
        delta = self.world.kills - kills_before
        self.done = (
            self.world.clock >= cfg.time_limit or self.world.alive_count(PURSUER) == 0
        )
        return StepResult(
            obs_pursuer=self._observe(PURSUER),
            obs_evader=self._observe(EVADER),
            reward_pursuer=delta,
            reward_evader=-delta,
            done=self.done,
            episode_score=self.world.kills,
            flags=tuple(flags),
        )

    def _observe(self, team: int) -> Observation:
        return render_observation(
            self.world, team, self.camera[team], self.selected[team], self.config.camera_size
        )

    @property
    def steps_taken(self) -> int:
        return self._steps

    @property
    def score(self) -> int:
        return self.world.kills
