"""Uniform-random relocation evader over the wire.

Connects to a serving session, plays every episode it offers, and writes
one CSV row per episode. The policy mirrors the server's scripted "random"
evader exactly: the per-episode stream is SeedSequence(seed + episode,
spawn_key=(2,)), one fresh minimap cell per decision once the army is
selected, so a session served with a scripted pursuer reproduces the
in-process experiment score for score.
"""

from __future__ import annotations

import argparse
import sys
from typing import IO, Callable

import numpy as np

from ..actions import Action
from ..env import Observation, RemoteEnv, connect

EVADER_STREAM_KEY = 2  # pursuer policies draw from spawn_key (1,), evaders from (2,)


def evader_stream(seed: int) -> np.random.Generator:
    """The documented per-episode evader policy stream."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(EVADER_STREAM_KEY,)))
    )


def random_policy(rng: np.random.Generator, lx: int, ly: int) -> Callable[[Observation], Action]:
    def act(obs: Observation) -> Action:
        if not obs.selected:
            return Action.select_army()
        x = int(rng.integers(lx))
        y = int(rng.integers(ly))
        return Action.move_minimap(x, y)

    return act


def play_session(env: RemoteEnv) -> list[tuple[int, int]]:
    """All episodes of the session; returns (episode, final score) rows."""
    rows = []
    for _ in range(env.config.episodes):
        obs = env.reset()
        policy = random_policy(
            evader_stream(env.config.seed + obs.episode), env.config.lx, env.config.ly
        )
        episode = obs.episode
        done = False
        info: dict = {}
        while not done:
            nxt, _reward, done, info = env.step(policy(obs))
            if not done:
                obs = nxt
        rows.append((episode, info["episode_end"]["score"]))
    return rows


def write_scores(rows: list[tuple[int, int]], out: IO[str]) -> None:
    out.write("episode,score\n")
    for episode, score in rows:
        out.write(f"{episode},{score}\n")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, required=True)
    parser.add_argument("--csv", default=None, help="score table destination (default stdout)")
    parser.add_argument("--timeout", type=float, default=60.0, help="per-read timeout, seconds")
    args = parser.parse_args(argv)

    with connect((args.host, args.port), "evader", timeout=args.timeout) as env:
        rows = play_session(env)
    if args.csv is None:
        write_scores(rows, sys.stdout)
    else:
        with open(args.csv, "w", encoding="utf-8", newline="\n") as f:
            write_scores(rows, f)
    mean = sum(score for _, score in rows) / len(rows)
    print(f"mean score {mean:.2f} over {len(rows)} episodes", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
