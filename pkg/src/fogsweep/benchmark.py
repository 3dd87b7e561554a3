"""Compare the compiled tick kernel against the pure Python fallback.

Both kernels must produce bit-identical worlds; this module re-checks that
on the benchmark workload before timing them, so a reported speedup is never
a speedup of a divergent implementation.

Run as: python -m fogsweep.benchmark [--ticks N] [--evaders N] [--repeat K]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import _tick_py, kernel
from .units import UNIT_TYPES
from .world import EVADER, PURSUER, GameDomain, Order, Vec2, WorldState


def build_world(seed: int, n_pursuers: int = 3, n_evaders: int = 25) -> WorldState:
    """A representative mid-fight world: pursuers on attack-move into the
    swarm, evaders scattering to random waypoints."""
    world = WorldState(GameDomain(32.0, 32.0), seed)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(9,))))
    marine = UNIT_TYPES["marine"]
    zergling = UNIT_TYPES["zergling"]
    center = Vec2(16.0, 16.0)
    for _ in range(n_pursuers):
        uid = world.add_unit(PURSUER, marine, center)
        tx, ty = rng.uniform(0.0, 32.0, size=2)
        world.set_order(uid, Order("attack_move", Vec2(float(tx), float(ty))))
    for _ in range(n_evaders):
        px, py = rng.uniform(0.0, 32.0, size=2)
        uid = world.add_unit(EVADER, zergling, Vec2(float(px), float(py)))
        tx, ty = rng.uniform(0.0, 32.0, size=2)
        world.set_order(uid, Order("move", Vec2(float(tx), float(ty))))
    return world


def _snapshot(world: WorldState) -> tuple:
    n = len(world)
    return (
        world.x[:n].tobytes(),
        world.y[:n].tobytes(),
        world.health[:n].tobytes(),
        world.alive[:n].tobytes(),
        world.kills,
    )


def run_ticks(backend, seed: int, ticks: int, n_evaders: int, dt: float = 0.125) -> tuple:
    world = build_world(seed, n_evaders=n_evaders)
    for _ in range(ticks):
        kernel.world_tick(world, dt, backend=backend)
    return _snapshot(world)


def time_backend(backend, seed: int, ticks: int, n_evaders: int, repeat: int) -> float:
    """Best-of-`repeat` seconds for `ticks` ticks."""
    best = float("inf")
    for _ in range(repeat):
        world = build_world(seed, n_evaders=n_evaders)
        t0 = time.perf_counter()
        for _ in range(ticks):
            kernel.world_tick(world, 0.125, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ticks", type=int, default=5000)
    parser.add_argument("--evaders", type=int, default=25)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)

    backends = [("python", _tick_py)]
    try:
        from . import _tick_cy

        backends.append(("cython", _tick_cy))
    except ImportError:
        print("compiled kernel not available; timing the pure kernel only")

    if len(backends) == 2:
        a = run_ticks(backends[0][1], args.seed, args.ticks, args.evaders)
        b = run_ticks(backends[1][1], args.seed, args.ticks, args.evaders)
        if a != b:
            print("FAIL: kernels diverged on the benchmark workload")
            return 1
        print(f"kernels bit-identical over {args.ticks} ticks")

    times = {}
    for name, backend in backends:
        secs = time_backend(backend, args.seed, args.ticks, args.evaders, args.repeat)
        times[name] = secs
        rate = args.ticks / secs
        print(f"{name:<7} {secs * 1e6 / args.ticks:8.2f} us/tick  ({rate:,.0f} ticks/s)")
    if len(times) == 2:
        print(f"speedup {times['python'] / times['cython']:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
