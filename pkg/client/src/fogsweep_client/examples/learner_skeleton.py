"""Observation-to-tensor plumbing for a learning evader.

The network is user-supplied: swap RandomHead for a model mapping the
stacked feature layers to one of flat_action_count() outputs. The loop
here shows the full contract: decode each observation into the (3, ly, lx)
minimap and (3, cs, cs) screen tensors, pick one flat index, send the
decoded action, and accumulate the evader's reward, which is the negative
of the pursuer's kills (zero-sum), so an episode's reward sum equals
-score.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any

import numpy as np

from ..actions import flat_action_count, index_to_action
from ..env import RemoteEnv, connect


class RandomHead:
    """Stand-in policy: uniform over the flat head."""

    def __init__(self, n_actions: int, rng: np.random.Generator) -> None:
        self.n_actions = n_actions
        self.rng = rng

    def __call__(self, minimap: np.ndarray, screen: np.ndarray) -> int:
        # a real head would consume the tensors here
        return int(self.rng.integers(self.n_actions))


def run_episode(env: RemoteEnv, head: RandomHead) -> dict[str, Any]:
    """One episode driven by `head`; returns the reward accounting."""
    obs = env.reset()
    episode = obs.episode
    reward_sum = 0
    minimap_shape = screen_shape = None
    done = False
    info: dict[str, Any] = {}
    while not done:
        minimap = obs.minimap_tensor()
        screen = obs.screen_tensor()
        minimap_shape = minimap.shape
        screen_shape = screen.shape
        index = head(minimap, screen)
        action = index_to_action(index, env.config.lx, env.config.ly, env.role)
        nxt, reward, done, info = env.step(action)
        reward_sum += reward
        if not done:
            obs = nxt
    end = info["episode_end"]
    return {
        "episode": episode,
        "reward_sum": reward_sum,
        "score": end["score"],
        "kills": end["kills"],
        "duration": end["duration"],
        "minimap_shape": minimap_shape,
        "screen_shape": screen_shape,
    }


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, required=True)
    parser.add_argument("--head-seed", type=int, default=0)
    parser.add_argument("--timeout", type=float, default=60.0, help="per-read timeout, seconds")
    args = parser.parse_args(argv)

    with connect((args.host, args.port), "evader", timeout=args.timeout) as env:
        head = RandomHead(
            flat_action_count(env.config.lx, env.config.ly),
            np.random.default_rng(args.head_seed),
        )
        for _ in range(env.config.episodes):
            out = run_episode(env, head)
            print(
                f"episode {out['episode']}: reward sum {out['reward_sum']}"
                f" score {out['score']} tensors {out['minimap_shape']} {out['screen_shape']}"
            )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
