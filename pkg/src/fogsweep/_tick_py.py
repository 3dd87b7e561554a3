"""Pure-Python tick kernel, the reference implementation.

fogsweep._tick_cy is the compiled twin; both must produce bit-identical
states, so the arithmetic here is limited to +,-,*,/ and sqrt on doubles
and every expression is written exactly as in the .pyx file.

Tick order: combat targeting from the pre-tick snapshot, then damage and
deaths applied at once, then the survivors move along their standing orders.
Units fire on the move: an attack_move order advances and shoots in the
same tick (hold orders never fire, move orders never shoot).
"""

from __future__ import annotations

import math

import numpy as np

_INF = float("inf")


def combat_pairs(
    xs: list[float],
    ys: list[float],
    alive: list[int],
    team: list[int],
    order_kind: list[int],
    atk_range: list[float],
    sight: list[float],
) -> list[tuple[int, int]]:
    """(attacker, target) pairs for one combat step, in attacker id order.

    A unit fires iff it holds an attack_move order and some enemy is both
    inside its attack range and revealed to its team's shared vision. The
    nearest such enemy is chosen, ties to the lower id.
    """
    n = len(xs)
    seen_by = ([False] * n, [False] * n)
    for j in range(n):
        if not alive[j]:
            continue
        t = 1 - team[j]  # the team that might see j
        mask = seen_by[t]
        for i in range(n):
            if alive[i] and team[i] == t:
                dx = xs[j] - xs[i]
                dy = ys[j] - ys[i]
                if dx * dx + dy * dy <= sight[i] * sight[i]:
                    mask[j] = True
                    break
    pairs: list[tuple[int, int]] = []
    for a in range(n):
        if not alive[a] or order_kind[a] != 2:
            continue
        ta = team[a]
        r2 = atk_range[a] * atk_range[a]
        best = -1
        best_d2 = _INF
        for j in range(n):
            if not alive[j] or team[j] == ta or not seen_by[ta][j]:
                continue
            dx = xs[j] - xs[a]
            dy = ys[j] - ys[a]
            d2 = dx * dx + dy * dy
            if d2 <= r2 and d2 < best_d2:
                best_d2 = d2
                best = j
        if best >= 0:
            pairs.append((a, best))
    return pairs


def tick(
    x: np.ndarray,
    y: np.ndarray,
    health: np.ndarray,
    alive: np.ndarray,
    team: np.ndarray,
    order_kind: np.ndarray,
    wp_x: np.ndarray,
    wp_y: np.ndarray,
    speed: np.ndarray,
    sight: np.ndarray,
    atk_range: np.ndarray,
    dps: np.ndarray,
    dt: float,
    lx: float,
    ly: float,
) -> int:
    """Advance every array by one tick of length `dt`; returns evader deaths."""
    n = len(x)
    xs = x.tolist()
    ys = y.tolist()
    hp = health.tolist()
    al = alive.tolist()
    tm = team.tolist()
    ok = order_kind.tolist()
    wxs = wp_x.tolist()
    wys = wp_y.tolist()
    sp = speed.tolist()
    sg = sight.tolist()
    ar = atk_range.tolist()
    dp = dps.tolist()

    for a, t in combat_pairs(xs, ys, al, tm, ok, ar, sg):
        hp[t] = hp[t] - dp[a] * dt
    evader_deaths = 0
    for i in range(n):
        if al[i] and hp[i] <= 0.0:
            al[i] = 0
            hp[i] = 0.0
            if tm[i] == 1:
                evader_deaths += 1

    for i in range(n):
        if not al[i] or ok[i] == 0:
            continue
        dx = wxs[i] - xs[i]
        dy = wys[i] - ys[i]
        d = math.sqrt(dx * dx + dy * dy)
        step = sp[i] * dt
        if d <= step:
            nx = wxs[i]
            ny = wys[i]
        else:
            nx = xs[i] + step * dx / d
            ny = ys[i] + step * dy / d
        if nx < 0.0:
            nx = 0.0
        elif nx > lx:
            nx = lx
        if ny < 0.0:
            ny = 0.0
        elif ny > ly:
            ny = ly
        xs[i] = nx
        ys[i] = ny

    x[:] = xs
    y[:] = ys
    health[:] = hp
    alive[:] = al
    return evader_deaths
