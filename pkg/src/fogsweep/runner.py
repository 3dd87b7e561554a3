"""Experiment harness: scripted-vs-scripted episodes, CSV tables, summaries.

The episode log written here is the reference format for the protocol
transparency check: a server session with both slots scripted emits exactly
these bytes for the same seed.
"""

from __future__ import annotations

import json
import math
import statistics
import time
from dataclasses import dataclass, field
from typing import Any, TextIO

from . import agents as agents_mod
from . import protocol
from .episode import Episode, EpisodeConfig, StepResult, empirical_capture_time
from .world import PURSUER


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: N episodes of a fixed matchup, episode i seeded
    seed + i."""

    map_id: str = "find_and_defeat_zerglings"
    pursuer: str = "traversal"
    evader: str = "builtin"
    episodes: int = 100
    seed: int = 0
    csv_path: str | None = None
    overrides: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.pursuer not in agents_mod.PURSUER_AGENTS:
            raise ValueError(f"unknown pursuer agent {self.pursuer!r}")
        if self.evader not in agents_mod.EVADER_AGENTS:
            raise ValueError(f"unknown evader agent {self.evader!r}")
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")

    def episode_config(self, index: int) -> EpisodeConfig:
        d = dict(self.overrides)
        d["map_id"] = self.map_id
        d["seed"] = self.seed + index
        return EpisodeConfig.from_dict(d)


@dataclass(frozen=True)
class EpisodeRecord:
    index: int
    seed: int
    score: int
    capture_time: float  # t_f / score, +inf when score = 0
    pursuers_alive: int
    wall_ms: float


CSV_COLUMNS = ("episode", "seed", "score", "capture_time", "pursuers_alive")


class EpisodeLogWriter:
    """Canonical JSONL trace of one or more episodes.

    One line per event: start, one per decision step, end. Lines use the
    wire encoding rules (compact separators, fixed key order), so two runs
    agree byte-for-byte exactly when their episodes evolved identically.
    """

    def __init__(self, stream: TextIO) -> None:
        self.stream = stream

    def _emit(self, payload: dict[str, Any]) -> None:
        self.stream.write(json.dumps(payload, separators=(",", ":")) + "\n")

    def start(self, index: int, seed: int, map_id: str) -> None:
        self._emit({"event": "start", "episode": index, "seed": seed, "map_id": map_id})

    def step(self, step: int, act_p: protocol.Act, act_e: protocol.Act, result: StepResult) -> None:
        payload: dict[str, Any] = {
            "event": "step",
            "step": step,
            "pursuer": _act_payload(act_p),
            "evader": _act_payload(act_e),
            "reward": result.reward_pursuer,
            "score": result.episode_score,
            "done": result.done,
        }
        if result.flags:
            payload["flags"] = list(result.flags)
        self._emit(payload)

    def end(self, end: protocol.EpisodeEnd, steps: int) -> None:
        self._emit(
            {
                "event": "end",
                "score": end.score,
                "kills": end.kills,
                "duration": end.duration,
                "steps": steps,
            }
        )


def _act_payload(act: protocol.Act) -> dict[str, Any]:
    payload = act.to_payload()
    del payload["type"]
    return payload


def run_episode(
    config: EpisodeConfig,
    pursuer: str,
    evader: str,
    log: EpisodeLogWriter | None = None,
    index: int = 0,
) -> EpisodeRecord:
    """Play one scripted-vs-scripted episode to completion."""
    engine = Episode(config, evader_unit_ai=agents_mod.evader_unit_ai(evader, config))
    t0 = time.perf_counter()
    obs_p, obs_e = engine.reset()
    agent_p = agents_mod.make_pursuer(pursuer, config, config.seed)
    agent_e = agents_mod.make_evader(evader, config, config.seed)
    if log is not None:
        log.start(index, config.seed, config.map_id)
    step = 0
    while True:
        act_p = agent_p.step(obs_p)
        act_e = agent_e.step(obs_e)
        result = engine.step(act_p, act_e)
        if log is not None:
            log.step(step, protocol.action_to_act(act_p), protocol.action_to_act(act_e), result)
        obs_p, obs_e = result.obs_pursuer, result.obs_evader
        step += 1
        if result.done:
            break
    wall_ms = (time.perf_counter() - t0) * 1000.0
    if log is not None:
        end = protocol.EpisodeEnd(
            score=engine.score, kills=engine.score, duration=engine.world.clock
        )
        log.end(end, step)
    return EpisodeRecord(
        index=index,
        seed=config.seed,
        score=engine.score,
        capture_time=empirical_capture_time(engine.score, config.time_limit),
        pursuers_alive=engine.world.alive_count(PURSUER),
        wall_ms=wall_ms,
    )


@dataclass(frozen=True)
class ExperimentSummary:
    episodes: int
    mean_score: float
    std_score: float
    mean_capture_time: float  # over scoring episodes
    zero_score_episodes: int
    mean_wall_ms: float

    def lines(self) -> list[str]:
        out = [
            f"episodes            {self.episodes}",
            f"mean score          {self.mean_score:.2f}",
            f"stddev score        {self.std_score:.2f}",
        ]
        if math.isfinite(self.mean_capture_time):
            out.append(f"mean capture time   {self.mean_capture_time:.2f} s")
        if self.zero_score_episodes:
            out.append(f"zero-score episodes {self.zero_score_episodes}")
        out.append(f"mean episode wall   {self.mean_wall_ms:.0f} ms")
        return out


def run_experiment(spec: ExperimentSpec) -> tuple[list[EpisodeRecord], ExperimentSummary]:
    records = []
    for i in range(spec.episodes):
        records.append(run_episode(spec.episode_config(i), spec.pursuer, spec.evader, index=i))
    if spec.csv_path is not None:
        with open(spec.csv_path, "w", encoding="utf-8", newline="\n") as f:
            write_csv(records, f)
    return records, summarize(records)


def summarize(records: list[EpisodeRecord]) -> ExperimentSummary:
    scores = [r.score for r in records]
    finite_v = [r.capture_time for r in records if math.isfinite(r.capture_time)]
    return ExperimentSummary(
        episodes=len(records),
        mean_score=statistics.fmean(scores),
        std_score=statistics.pstdev(scores) if len(scores) > 1 else 0.0,
        mean_capture_time=statistics.fmean(finite_v) if finite_v else math.inf,
        zero_score_episodes=sum(1 for r in records if r.score == 0),
        mean_wall_ms=statistics.fmean(r.wall_ms for r in records),
    )


def write_csv(records: list[EpisodeRecord], stream: TextIO, timing: bool = False) -> None:
    """Stable plain-text table; floats via repr so bytes are reproducible.

    Wall-clock stays out unless asked for: it can never reproduce across
    runs, and the determinism contract is on the file bytes.
    """
    columns = CSV_COLUMNS + (("wall_ms",) if timing else ())
    stream.write(",".join(columns) + "\n")
    for r in sorted(records, key=lambda r: r.index):
        row = [str(r.index), str(r.seed), str(r.score), repr(r.capture_time), str(r.pursuers_alive)]
        if timing:
            row.append(repr(r.wall_ms))
        stream.write(",".join(row) + "\n")


__all__ = [
    "CSV_COLUMNS",
    "EpisodeLogWriter",
    "EpisodeRecord",
    "ExperimentSpec",
    "ExperimentSummary",
    "run_episode",
    "run_experiment",
    "summarize",
    "write_csv",
]
