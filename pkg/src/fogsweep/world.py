"""World state and the unit-level rules: movement, sight, combat.

Geometry convention: the domain is the rectangle [0, lx] x [0, ly] with the
origin in the top-left corner, x growing right and y growing down. Positions
are continuous; grid cells only exist at the observation layer.

The state of all units lives in parallel numpy arrays (index == unit id) so
the tick kernels can run over raw buffers; `Unit` objects are read-only
snapshots built on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np

from .units import UnitStats

PURSUER = 0
EVADER = 1

TEAM_NAMES = ("pursuer", "evader")

ORDER_HOLD = 0
ORDER_MOVE = 1
ORDER_ATTACK_MOVE = 2

_ORDER_KINDS = ("hold", "move", "attack_move")


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite position ({self.x}, {self.y})")


@dataclass(frozen=True)
class GameDomain:
    """Axis-aligned playable rectangle, sized in cells."""

    lx: float
    ly: float

    def __post_init__(self) -> None:
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError("domain sides must be positive")

    @property
    def area(self) -> float:
        return self.lx * self.ly

    def contains(self, p: Vec2) -> bool:
        return 0.0 <= p.x <= self.lx and 0.0 <= p.y <= self.ly

    def clamp(self, x: float, y: float) -> tuple[float, float]:
        return (min(max(x, 0.0), self.lx), min(max(y, 0.0), self.ly))


def distance(p: Vec2, q: Vec2) -> float:
    """Euclidean distance between two points."""
    return math.sqrt((p.x - q.x) ** 2 + (p.y - q.y) ** 2)


def longest_internal_distance(domain: GameDomain) -> float:
    """Length of the domain diagonal, the worst-case internal travel."""
    return math.sqrt(domain.lx * domain.lx + domain.ly * domain.ly)


@dataclass(frozen=True)
class Order:
    """Standing order; persists across ticks until replaced."""

    kind: Literal["hold", "move", "attack_move"]
    target: Vec2 | None = None

    def __post_init__(self) -> None:
        if self.kind not in _ORDER_KINDS:
            raise ValueError(f"unknown order kind {self.kind!r}")
        if self.kind == "hold":
            if self.target is not None:
                raise ValueError("hold takes no target")
        elif self.target is None:
            raise ValueError(f"{self.kind} needs a target")


HOLD = Order("hold")


@dataclass(frozen=True)
class Unit:
    """Read-only snapshot of one unit."""

    id: int
    team: Literal["pursuer", "evader"]
    stats: UnitStats
    pos: Vec2
    health: float
    alive: bool
    order: Order


@dataclass(frozen=True)
class DamageEvent:
    attacker_id: int
    target_id: int
    amount: float


class WorldState:
    """All units plus the match clock and kill counter.

    Unit ids are assigned sequentially and never reused; dead units keep
    their slot with health 0. Iteration anywhere in the engine is in id
    order, which makes every tick a deterministic function of state.
    """

    def __init__(self, domain: GameDomain, seed: int = 0) -> None:
        self.domain = domain
        self.clock = 0.0
        self.kills = 0
        self.rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        self._n = 0
        cap = 64
        self.x = np.zeros(cap)
        self.y = np.zeros(cap)
        self.health = np.zeros(cap)
        self.wp_x = np.zeros(cap)
        self.wp_y = np.zeros(cap)
        self.speed = np.zeros(cap)
        self.sight = np.zeros(cap)
        self.attack_range = np.zeros(cap)
        self.dps = np.zeros(cap)
        self.health_max = np.zeros(cap)
        self.team = np.zeros(cap, dtype=np.int8)
        self.order_kind = np.zeros(cap, dtype=np.int8)
        self.alive = np.zeros(cap, dtype=np.uint8)
        self._stats: list[UnitStats] = []

    def __len__(self) -> int:
        return self._n

    def _grow(self) -> None:
        cap = len(self.x) * 2
        for name in ("x", "y", "health", "wp_x", "wp_y", "speed", "sight",
                     "attack_range", "dps", "health_max", "team", "order_kind", "alive"):
            old = getattr(self, name)
            new = np.zeros(cap, dtype=old.dtype)
            new[: self._n] = old[: self._n]
            setattr(self, name, new)

    def add_unit(self, team: int, stats: UnitStats, pos: Vec2, order: Order = HOLD) -> int:
        if team not in (PURSUER, EVADER):
            raise ValueError(f"bad team {team}")
        if not self.domain.contains(pos):
            raise ValueError(f"spawn outside domain: {pos}")
        if self._n == len(self.x):
            self._grow()
        i = self._n
        self._n += 1
        self.x[i] = pos.x
        self.y[i] = pos.y
        self.health[i] = stats.health_max
        self.speed[i] = stats.speed
        self.sight[i] = stats.sight
        self.attack_range[i] = stats.attack_range
        self.dps[i] = stats.dps
        self.health_max[i] = stats.health_max
        self.team[i] = team
        self.alive[i] = 1
        self._stats.append(stats)
        self._write_order(i, order)
        return i

    def _write_order(self, uid: int, order: Order) -> None:
        self.order_kind[uid] = _ORDER_KINDS.index(order.kind)
        if order.target is None:
            self.wp_x[uid] = self.x[uid]
            self.wp_y[uid] = self.y[uid]
        else:
            self.wp_x[uid] = order.target.x
            self.wp_y[uid] = order.target.y

    def set_order(self, uid: int, order: Order) -> None:
        if not 0 <= uid < self._n:
            raise KeyError(uid)
        if not self.alive[uid]:
            return  # dead units never act
        self._write_order(uid, order)

    def unit(self, uid: int) -> Unit:
        if not 0 <= uid < self._n:
            raise KeyError(uid)
        kind = _ORDER_KINDS[self.order_kind[uid]]
        target = None if kind == "hold" else Vec2(float(self.wp_x[uid]), float(self.wp_y[uid]))
        return Unit(
            id=uid,
            team=TEAM_NAMES[self.team[uid]],
            stats=self._stats[uid],
            pos=Vec2(float(self.x[uid]), float(self.y[uid])),
            health=float(self.health[uid]),
            alive=bool(self.alive[uid]),
            order=Order(kind, target),
        )

    @property
    def units(self) -> list[Unit]:
        return [self.unit(i) for i in range(self._n)]

    def __iter__(self) -> Iterator[Unit]:
        return iter(self.units)

    def alive_count(self, team: int) -> int:
        n = self._n
        return int(np.count_nonzero(self.alive[:n] & (self.team[:n] == team)))

    def alive_ids(self, team: int) -> list[int]:
        n = self._n
        mask = (self.alive[:n] == 1) & (self.team[:n] == team)
        return [int(i) for i in np.nonzero(mask)[0]]


def team_visibility(world: WorldState, team: int) -> np.ndarray:
    """Boolean mask over unit ids: enemy units revealed to `team`.

    An enemy is revealed when at least one alive unit of `team` has it
    within its own sight radius; vision is shared across the team. Exact
    positions are compared, not cells.
    """
    n = len(world)
    out = np.zeros(n, dtype=bool)
    if n == 0:
        return out
    own = (world.team[:n] == team) & (world.alive[:n] == 1)
    foe = (world.team[:n] != team) & (world.alive[:n] == 1)
    if not own.any() or not foe.any():
        return out
    ox = world.x[:n][own]
    oy = world.y[:n][own]
    sight2 = world.sight[:n][own] ** 2
    fi = np.nonzero(foe)[0]
    dx = world.x[fi][:, None] - ox[None, :]
    dy = world.y[fi][:, None] - oy[None, :]
    seen = ((dx * dx + dy * dy) <= sight2[None, :]).any(axis=1)
    out[fi] = seen
    return out


def visible_enemies(team: int, world: WorldState) -> set[int]:
    """Ids of enemy units currently revealed to `team`."""
    if team not in (PURSUER, EVADER):
        raise ValueError(f"bad team {team}")
    return {int(i) for i in np.nonzero(team_visibility(world, team))[0]}


def advance_unit(unit: Unit, dt: float, domain: GameDomain) -> Vec2:
    """New position after `dt` seconds of following the standing order.

    Straight-line motion at the unit's speed toward the order target; exact
    arrival is allowed when the target is within reach this step. The result
    is clamped to the domain, which makes motion toward an outside point
    slide along the wall.
    """
    if dt < 0:
        raise ValueError("dt must be >= 0")
    if not unit.alive or unit.order.kind == "hold" or unit.order.target is None:
        return unit.pos
    dx = unit.order.target.x - unit.pos.x
    dy = unit.order.target.y - unit.pos.y
    d = math.sqrt(dx * dx + dy * dy)
    step = unit.stats.speed * dt
    if d <= step:
        nx, ny = unit.order.target.x, unit.order.target.y
    else:
        nx = unit.pos.x + step * dx / d
        ny = unit.pos.y + step * dy / d
    cx, cy = domain.clamp(nx, ny)
    return Vec2(cx, cy)


def resolve_combat(world: WorldState, dt: float) -> list[DamageEvent]:
    """Apply one combat step of length `dt` and return the damage dealt.

    Every alive unit with an attack_move order fires at the nearest revealed
    enemy within its attack range (ties to the lower id) for dps*dt damage.
    All targeting and damage readings use the pre-call state, then deaths are
    applied at once, so simultaneous mutual kills are possible. The world
    kill counter advances by the number of evader deaths.
    """
    from . import _tick_py  # reference combat targeting, shared with the pure kernel

    if dt < 0:
        raise ValueError("dt must be >= 0")
    n = len(world)
    pairs = _tick_py.combat_pairs(
        world.x[:n].tolist(), world.y[:n].tolist(),
        world.alive[:n].tolist(), world.team[:n].tolist(),
        world.order_kind[:n].tolist(), world.attack_range[:n].tolist(),
        world.sight[:n].tolist(),
    )
    events = [DamageEvent(a, t, float(world.dps[a]) * dt) for a, t in pairs]
    for ev in events:
        world.health[ev.target_id] -= ev.amount
    for i in range(n):
        if world.alive[i] and world.health[i] <= 0.0:
            world.alive[i] = 0
            world.health[i] = 0.0
            if world.team[i] == EVADER:
                world.kills += 1
    return events
