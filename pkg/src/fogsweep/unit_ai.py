"""Built-in per-unit behaviors of the mini-games.

These fill orders for a side that no action agent drives. Both are stateless
functions of the current world, called once per tick, so replays stay
deterministic. Triggers use each unit's own sight radius.
"""

from __future__ import annotations

import math

from .world import EVADER, HOLD, PURSUER, Order, Vec2, WorldState

# Fresh flee waypoints are planted this far ahead each tick; anything larger
# than one tick of travel gives continuous full-speed flight.
FLEE_STEP = 2.0


def zergling_orders(world: WorldState) -> None:
    """Aggressive evaders: hold until a pursuer enters sight, then attack-move
    onto the nearest pursuer (melee)."""
    pursuers = world.alive_ids(PURSUER)
    for e in world.alive_ids(EVADER):
        ex = world.x[e]
        ey = world.y[e]
        sight2 = world.sight[e] * world.sight[e]
        best = -1
        best_d2 = math.inf
        for p in pursuers:
            dx = world.x[p] - ex
            dy = world.y[p] - ey
            d2 = dx * dx + dy * dy
            if d2 <= sight2 and d2 < best_d2:
                best_d2 = d2
                best = p
        if best >= 0:
            world.set_order(e, Order("attack_move", Vec2(float(world.x[best]), float(world.y[best]))))
        else:
            world.set_order(e, HOLD)


def drone_orders(world: WorldState) -> None:
    """Timid evaders: hold until a pursuer enters sight, then run straight
    away from the centroid of the pursuers in sight. The domain clamp turns
    boundary contact into a slide along the wall."""
    pursuers = world.alive_ids(PURSUER)
    for e in world.alive_ids(EVADER):
        ex = world.x[e]
        ey = world.y[e]
        sight2 = world.sight[e] * world.sight[e]
        sx = 0.0
        sy = 0.0
        seen = 0
        for p in pursuers:
            dx = world.x[p] - ex
            dy = world.y[p] - ey
            if dx * dx + dy * dy <= sight2:
                sx += world.x[p]
                sy += world.y[p]
                seen += 1
        if seen == 0:
            world.set_order(e, HOLD)
            continue
        ax = ex - sx / seen
        ay = ey - sy / seen
        norm = math.sqrt(ax * ax + ay * ay)
        if norm == 0.0:
            world.set_order(e, HOLD)  # boxed in exactly; nowhere to run
            continue
        # The waypoint may fall outside the domain on purpose: the movement
        # clamp projects the resulting velocity along the wall.
        world.set_order(e, Order("move", Vec2(ex + ax / norm * FLEE_STEP, ey + ay / norm * FLEE_STEP)))
