"""Tick kernel selection.

The compiled Cython kernel is used when its extension module imported
cleanly; otherwise the pure Python reference kernel takes over. Set
FOGSWEEP_PURE=1 to force the pure kernel (useful for debugging and for the
equivalence tests). Both backends are bit-identical by construction.
"""

from __future__ import annotations

import os

from . import _tick_py
from .world import WorldState

if os.environ.get("FOGSWEEP_PURE", "") not in ("", "0"):
    _backend = _tick_py
    BACKEND = "python"
else:
    try:
        from . import _tick_cy as _backend  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _backend = _tick_py
        BACKEND = "python"


def backend_name() -> str:
    return BACKEND


def world_tick(world: WorldState, dt: float, backend=None) -> int:
    """One combat+movement tick over the whole world; returns evader deaths.

    Advances the world clock and kill counter. `backend` overrides the
    module selection (the benchmark and equivalence tests pass kernels in
    explicitly).
    """
    if dt < 0:
        raise ValueError("dt must be >= 0")
    impl = _backend if backend is None else backend
    n = len(world)
    deaths = impl.tick(
        world.x[:n], world.y[:n], world.health[:n], world.alive[:n],
        world.team[:n], world.order_kind[:n], world.wp_x[:n], world.wp_y[:n],
        world.speed[:n], world.sight[:n], world.attack_range[:n], world.dps[:n],
        dt, world.domain.lx, world.domain.ly,
    )
    world.kills += deaths
    world.clock += dt
    return deaths
