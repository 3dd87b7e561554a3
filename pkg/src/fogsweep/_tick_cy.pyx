# Compiled twin of fogsweep._tick_py.tick. Same tick order, same arithmetic
# (+,-,*,/ and sqrt on doubles only), so trajectories are bit-identical to
# the pure Python kernel. Units fire on the move. Keep every expression textually in sync with
# _tick_py before touching either file.

import numpy as np

from libc.math cimport sqrt, INFINITY


def tick(double[:] x, double[:] y, double[:] health, unsigned char[:] alive,
         signed char[:] team, signed char[:] order_kind,
         double[:] wp_x, double[:] wp_y,
         double[:] speed, double[:] sight, double[:] atk_range, double[:] dps,
         double dt, double lx, double ly):
    """Advance every array by one tick of length `dt`; returns evader deaths."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j, a, best
    cdef int t, ta
    cdef double dx, dy, d, d2, r2, best_d2, step, nx, ny
    cdef int evader_deaths = 0

    seen_arr = np.zeros((2, n if n > 0 else 1), dtype=np.uint8)
    cdef unsigned char[:, ::1] seen = seen_arr

    for j in range(n):
        if not alive[j]:
            continue
        t = 1 - team[j]
        for i in range(n):
            if alive[i] and team[i] == t:
                dx = x[j] - x[i]
                dy = y[j] - y[i]
                if dx * dx + dy * dy <= sight[i] * sight[i]:
                    seen[t, j] = 1
                    break

    for a in range(n):
        if not alive[a] or order_kind[a] != 2:
            continue
        ta = team[a]
        r2 = atk_range[a] * atk_range[a]
        best = -1
        best_d2 = INFINITY
        for j in range(n):
            if not alive[j] or team[j] == ta or not seen[ta, j]:
                continue
            dx = x[j] - x[a]
            dy = y[j] - y[a]
            d2 = dx * dx + dy * dy
            if d2 <= r2 and d2 < best_d2:
                best_d2 = d2
                best = j
        if best >= 0:
            health[best] = health[best] - dps[a] * dt

    for i in range(n):
        if alive[i] and health[i] <= 0.0:
            alive[i] = 0
            health[i] = 0.0
            if team[i] == 1:
                evader_deaths += 1

    for i in range(n):
        if not alive[i] or order_kind[i] == 0:
            continue
        dx = wp_x[i] - x[i]
        dy = wp_y[i] - y[i]
        d = sqrt(dx * dx + dy * dy)
        step = speed[i] * dt
        if d <= step:
            nx = wp_x[i]
            ny = wp_y[i]
        else:
            nx = x[i] + step * dx / d
            ny = y[i] + step * dy / d
        if nx < 0.0:
            nx = 0.0
        elif nx > lx:
            nx = lx
        if ny < 0.0:
            ny = 0.0
        elif ny > ly:
            ny = ly
        x[i] = nx
        y[i] = ny

    return evader_deaths
